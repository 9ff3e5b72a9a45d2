// Acceptance checks A1-A10. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. `acceptance A3 A7` runs a subset.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "brute.hpp"
#include "fixture.hpp"
#include "ugcs/aggregate.hpp"
#include "ugcs/compare.hpp"
#include "ugcs/difficulty.hpp"
#include "ugcs/log_io.hpp"
#include "ugcs/report.hpp"
#include "ugcs/selection.hpp"
#include "ugcs/synthetic.hpp"

using namespace ugcs;

namespace {

constexpr int kFixtures = 50;

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fixture::Fixture fixture_for(int i) {
  fixture::FixtureOptions opt;
  // Fixture 0 is the full-length run, so checkpoint 100 with delta 100 is covered.
  if (i == 0) opt.min_steps = opt.max_steps = 1000;
  opt.quantized = i % 2 == 1;
  return fixture::make_fixture(static_cast<std::uint64_t>(i) + 1000, opt);
}

struct Prepared {
  fixture::Fixture f;
  std::vector<AggregatedSample> train;
  std::vector<AggregatedSample> validation;
  ScoringInputs inputs() const { return {train, validation, &f.manifest}; }
};

Prepared prepare(int i) {
  Prepared p{fixture_for(i), {}, {}};
  p.train = aggregate_samples(p.f.train, DifficultyMetric{}, p.f.manifest.n_per_question).samples;
  p.validation = aggregate_samples(p.f.validation, DifficultyMetric{}, p.f.manifest.n_per_question).samples;
  return p;
}

Outcome a1() {
  double worst_err = 0.0, worst_time = 0.0;
  std::size_t compared = 0;
  for (int i = 0; i < kFixtures; ++i) {
    const auto f = fixture_for(i);
    const auto t0 = Clock::now();
    const auto xs = aggregate_samples(f.train, DifficultyMetric{}).samples;
    std::vector<double> got;
    for (Step cp : f.manifest.checkpoint_steps) {
      for (Step d : default_delta_grid()) {
        const Window w = extract_window(xs, cp, d);
        for (double p : default_p_grid()) got.push_back(ugcs_score(w, p).value);
      }
    }
    worst_time = std::max(worst_time, seconds_since(t0));
    const auto bx = brute::group(f.train);
    std::size_t at = 0;
    for (Step cp : f.manifest.checkpoint_steps) {
      for (Step d : default_delta_grid()) {
        const auto bw = brute::window(bx, cp, d);
        for (double p : default_p_grid()) {
          const double want = brute::ugcs(bw, p), diff = std::abs(got[at++] - want);
          worst_err = std::max(worst_err, want == 0.0 ? diff : diff / std::abs(want));
          ++compared;
        }
      }
    }
  }
  return {worst_err <= 1e-12 && worst_time < 5.0,
          fmt("%d fixtures, %zu scores, max rel err %.3g (<= 1e-12), slowest fixture %.2fs (< 5s)", kFixtures, compared,
              worst_err, worst_time)};
}

Outcome a2() {
  std::size_t checked = 0, mismatched = 0;
  for (int i = 0; i < kFixtures; ++i) {
    const auto p = prepare(i);
    for (Step cp : p.f.manifest.checkpoint_steps) {
      for (Step d : default_delta_grid()) {
        const Window w = extract_window(p.train, cp, d);
        const double a = ugcs_score(w, 100).value, b = train_reward_score(w).value;
        mismatched += std::bit_cast<std::uint64_t>(a) != std::bit_cast<std::uint64_t>(b);
        ++checked;
      }
    }
  }
  return {mismatched == 0, fmt("%zu windows, %zu bitwise mismatches", checked, mismatched)};
}

Outcome a3() {
  std::size_t checked = 0, bad = 0;
  bool clamped_case = false;
  for (int i = 0; i < kFixtures; ++i) {
    const auto p = prepare(i);
    for (Step cp : p.f.manifest.checkpoint_steps) {
      for (Step d : default_delta_grid()) {
        std::set<std::pair<Step, std::string>> want;
        std::set<Step> steps;
        for (const auto& s : p.train) {
          if (s.key.step >= cp - d && s.key.step >= 1 && s.key.step <= cp - 1) {
            want.insert({s.key.step, s.key.sample_id});
            steps.insert(s.key.step);
          }
        }
        std::set<std::pair<Step, std::string>> got;
        for (const auto& s : extract_window(p.train, cp, d).samples) got.insert({s.key.step, s.key.sample_id});
        bad += got != want;
        ++checked;
        if (cp == 100 && d == 100) {
          clamped_case = true;
          bad += !(*steps.begin() == 1 && *steps.rbegin() == 99 && steps.size() == 99);
        }
      }
    }
  }
  return {bad == 0 && clamped_case,
          fmt("%zu windows checked, %zu mismatches, clamped checkpoint 100 / delta 100 -> steps 1..99 %s", checked, bad,
              clamped_case ? "covered" : "missing")};
}

Outcome a4() {
  AnswerRecord zeros;
  zeros.num_tokens = 5;
  zeros.evidence = TokenLogprobs{{0, 0, 0, 0, 0}};
  const bool zero_ok = anll(zeros) == 0.0;
  std::mt19937_64 gen(404);
  std::uniform_real_distribution<double> u(0, 4);
  std::uniform_int_distribution<int> len(1, 200);
  std::size_t nll_bad = 0;
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    AnswerRecord r;
    r.num_tokens = len(gen);
    TokenLogprobs t;
    double sum = 0.0;
    for (std::int64_t k = 0; k < r.num_tokens; ++k) {
      t.values.push_back(-u(gen));
      sum += t.values.back();
    }
    r.evidence = t;
    nll_bad += nll(r) != anll(r) * static_cast<double>(r.num_tokens);
    AnswerRecord s = r;
    s.evidence = SumLogprob{sum};
    worst = std::max(worst, std::abs(anll(r) - anll(s)) / std::max(1.0, anll(s)));
  }
  return {zero_ok && nll_bad == 0 && worst <= 1e-12,
          fmt("anll(zeros)=0 %s, nll != anll*T on %zu/10000, evidence max rel diff %.3g (<= 1e-12)",
              zero_ok ? "yes" : "no", nll_bad, worst)};
}

Outcome a5() {
  std::size_t replays = 0, disagreements = 0;
  const auto t0 = Clock::now();
  for (int i = 0; i < kFixtures; ++i) {
    const auto p = prepare(i);
    auto ordered = p.f.train;
    std::stable_sort(ordered.begin(), ordered.end(), [](auto& a, auto& b) { return a.step < b.step; });
    std::vector<std::pair<std::size_t, std::size_t>> steps;  // [begin, end) per step
    for (std::size_t b = 0; b < ordered.size();) {
      std::size_t e = b;
      while (e < ordered.size() && ordered[e].step == ordered[b].step) ++e;
      steps.emplace_back(b, e);
      b = e;
    }
    for (Strategy s : kAllStrategies) {
      for (Step d : default_delta_grid()) {
        for (double pct : default_p_grid()) {
          const ScoringParams params{pct, d};
          const Step offline = rank_checkpoints(p.inputs(), s, params).winner;
          StreamSelector sel(p.f.manifest, s, params, DifficultyMetric{}, p.validation);
          for (auto [b, e] : steps) sel.update(ordered[b].step, std::span(ordered).subspan(b, e - b));
          sel.finish();
          disagreements += !sel.best() || sel.best()->checkpoint_step != offline;
          ++replays;
        }
      }
    }
  }
  return {disagreements == 0, fmt("%zu replays (50 fixtures x 5 strategies x p 1..20 x delta {10,20,50,100}), "
                                  "%zu disagree with the offline winner, %.1fs",
                                  replays, disagreements, seconds_since(t0))};
}

std::string report_bytes(const std::vector<AnswerRecord>& records, const RunManifest& manifest,
                         const std::filesystem::path& log) {
  {
    std::ofstream out(log, std::ios::binary);
    write_log(out, records);
  }
  const auto parsed = read_log_file(log, ParseOptions::for_manifest(manifest));
  const auto xs = aggregate_samples(parsed, DifficultyMetric{}, manifest.n_per_question).samples;
  const ScoringInputs in{xs, {}, &manifest};
  std::vector<RankingReport> rs;
  for (Strategy s : {Strategy::ugcs, Strategy::train_reward, Strategy::top_reward, Strategy::last_checkpoint}) {
    rs.push_back(rank_checkpoints(in, s, {3, 100}));
  }
  ReportContext ctx{"rank", ReportJson{{"log", log.string()}}, {}, {}};
  std::ostringstream out;
  write_json(out, ranking_report(ctx, rs));
  for (const auto& r : rs) write_scores_csv(out, r.scores);
  return out.str();
}

Outcome a6() {
  const auto log = std::filesystem::temp_directory_path() / "ugcs_acceptance_a6.jsonl";
  std::size_t runs = 0, differing = 0;
  for (int i = 0; i < 10; ++i) {
    const auto f = fixture_for(i);
    const std::string first = report_bytes(f.train, f.manifest, log);
    const std::string again = report_bytes(f.train, f.manifest, log);
    auto shuffled = f.train;
    std::mt19937_64 gen(static_cast<std::uint64_t>(i));
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    const std::string permuted = report_bytes(shuffled, f.manifest, log);
    std::reverse(shuffled.begin(), shuffled.end());
    const std::string reversed = report_bytes(shuffled, f.manifest, log);
    differing += (first != again) + (first != permuted) + (first != reversed);
    runs += 3;
    if (first.find("selected_keys") == std::string::npos) ++differing;
  }
  std::filesystem::remove(log);
  return {differing == 0, fmt("%zu report comparisons (repeat, shuffled, reversed) incl. selected_keys, %zu differ", runs,
                              differing)};
}

std::vector<RunOutcome> synthetic_outcomes(const std::string& preset, std::uint64_t seeds) {
  std::vector<RunOutcome> out;
  for (std::uint64_t s = 0; s < seeds; ++s) {
    SyntheticRunConfig cfg = synthetic_preset(preset);
    cfg.seed = s;
    out.push_back(evaluate_run(run_inputs_from(generate_run(cfg), std::to_string(s)), {10, 100}));
  }
  return out;
}

std::vector<double> regrets(const std::vector<RunOutcome>& runs, bool metrics, const std::string& row) {
  std::vector<double> out;
  for (const auto& r : runs) {
    for (const auto& o : metrics ? r.metrics : r.strategies) {
      if (o.row == row) out.push_back(o.regret);
    }
  }
  return out;
}

double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

std::vector<RunOutcome> g_default_runs;

const std::vector<RunOutcome>& default_runs() {
  if (g_default_runs.empty()) g_default_runs = synthetic_outcomes("default", 200);
  return g_default_runs;
}

Outcome a7() {
  const auto t0 = Clock::now();
  const auto& runs = default_runs();
  const double elapsed = seconds_since(t0);
  const auto u = regrets(runs, false, "ugcs");
  bool pass = elapsed < 300.0 && u.size() == 200;
  std::string detail = fmt("200 seeds in %.1fs; ugcs %.4f", elapsed, mean(u));
  for (const char* other : {"train_reward", "last_checkpoint"}) {
    const auto o = regrets(runs, false, other);
    const double pv = paired_one_sided_p(u, o);
    pass = pass && o.size() == u.size() && mean(u) <= mean(o) && pv < 0.05;
    detail += fmt(", %s %.4f (p=%.2g)", other, mean(o), pv);
  }
  return {pass, detail};
}

Outcome a8() {
  int agree = 0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    SyntheticRunConfig cfg = synthetic_preset("stationary");
    cfg.seed = static_cast<std::uint64_t>(s);
    const auto run = generate_run(cfg);
    const auto xs = aggregate_samples(run.train, DifficultyMetric{}, run.manifest.n_per_question).samples;
    const ScoringInputs in{xs, {}, &run.manifest};
    const std::vector<Step> grid{10, 100};
    agree += sweep_delta(in, grid, Strategy::ugcs, {10, 100}).winners_agree;
  }
  return {agree >= 90, fmt("delta 10 and 100 winners agree on %d/%d stationary seeds (>= 90)", agree, seeds)};
}

Outcome a9() {
  int hits = 0;
  const int seeds = 50;
  double planted = 0.0;
  for (int s = 0; s < seeds; ++s) {
    SyntheticRunConfig cfg = synthetic_preset("planted_p");
    cfg.seed = static_cast<std::uint64_t>(s);
    planted = *cfg.planted_p();
    const auto run = generate_run(cfg);
    const auto xs = aggregate_samples(run.train, DifficultyMetric{}, run.manifest.n_per_question).samples;
    const ScoringInputs in{xs, {}, &run.manifest};
    const CalibrationTable cal(run.truth.begin(), run.truth.end());
    const double rec = *sweep_p(in, default_p_grid(), cal, 100).recommended;
    hits += std::abs(rec - planted) <= 3.0;
  }
  return {hits >= 40, fmt("recommended p within +-3 of planted %.0f on %d/%d seeds (>= 40)", planted, hits, seeds)};
}

Outcome a10() {
  const auto& runs = default_runs();
  const CompareSummary table = summarize(runs, true, "anll");
  bool pass = table.rows.size() == 5;
  std::string detail = fmt("%zu metric rows;", table.rows.size());
  for (const auto& row : table.rows) detail += fmt(" %s %.4f", row.row.c_str(), row.mean_regret);
  double worst_p = 0.0;
  for (const char* live : {"anll", "nll"}) {
    for (const char* pre : {"pre_anll", "pre_nll", "pre_consistency"}) {
      const auto a = regrets(runs, true, live), b = regrets(runs, true, pre);
      const double pv = paired_one_sided_p(a, b);
      worst_p = std::max(worst_p, pv);
      pass = pass && mean(a) <= mean(b) && pv < 0.05;
    }
  }
  detail += fmt("; largest paired p (on-the-fly vs precomputed) %.2g", worst_p);
  return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
      {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4}, {"A5", a5},
      {"A6", a6}, {"A7", a7}, {"A8", a8}, {"A9", a9}, {"A10", a10}};
  std::set<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& [id, fn] : checks) {
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%-4s %s  %s\n", id.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
