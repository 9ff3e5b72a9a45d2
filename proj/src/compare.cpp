#include "ugcs/compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

#include "ugcs/aggregate.hpp"
#include "ugcs/errors.hpp"
#include "ugcs/log_io.hpp"
#include "ugcs/selection.hpp"

namespace ugcs {

RunInputs run_inputs_from(SyntheticRun run, std::string label) {
  RunInputs in;
  in.label = std::move(label);
  in.manifest = std::move(run.manifest);
  in.train = std::move(run.train);
  in.validation = std::move(run.validation);
  in.truth = std::move(run.truth);
  in.pre_tables = std::move(run.pre_tables);
  return in;
}

RunInputs load_run_directory(const std::filesystem::path& dir) {
  RunInputs in;
  in.label = dir.string();
  in.manifest = load_manifest(dir / "manifest.json");
  const auto opts = ParseOptions::for_manifest(in.manifest);
  in.train = read_log_file(dir / "train.jsonl", opts);
  if (std::filesystem::exists(dir / "val.jsonl")) in.validation = read_log_file(dir / "val.jsonl", opts);
  if (!std::filesystem::exists(dir / "truth.csv")) {
    throw MissingCalibrationError("no truth.csv in " + dir.string());
  }
  in.truth = load_step_table_csv(dir / "truth.csv");
  for (MetricKind k : kAllMetrics) {
    if (!is_precomputed(k)) continue;
    const auto path = dir / (std::string(metric_id(k)) + ".json");
    if (std::filesystem::exists(path)) in.pre_tables[k] = load_score_table_file(path.string());
  }
  return in;
}

RunOutcome evaluate_run(const RunInputs& run, const ScoringParams& params) {
  RunOutcome out;
  out.label = run.label;
  const int n = run.manifest.n_per_question;
  const auto anll_metric = DifficultyMetric::on_the_fly(MetricKind::anll);
  const AggregationResult train = aggregate_samples(run.train, anll_metric, n);
  AggregationResult val;
  if (!run.validation.empty()) val = aggregate_samples(run.validation, anll_metric, n);

  auto outcome = [&](const std::string& row, const RankingReport& r) {
    return RowOutcome{row, r.winner, selection_regret(run.truth, r.winner)};
  };

  for (Strategy s : kAllStrategies) {
    if (s == Strategy::val_reward && run.validation.empty()) {
      out.warnings.push_back(out.label + ": no validation log, val_reward skipped");
      continue;
    }
    const ScoringInputs inputs{train.samples, val.samples, &run.manifest};
    out.strategies.push_back(outcome(std::string(strategy_id(s)), rank_checkpoints(inputs, s, params)));
  }

  for (MetricKind k : kAllMetrics) {
    std::optional<DifficultyMetric> metric;
    if (!is_precomputed(k)) {
      metric = DifficultyMetric::on_the_fly(k);
    } else if (auto it = run.pre_tables.find(k); it != run.pre_tables.end()) {
      metric = DifficultyMetric::precomputed(k, it->second);
    } else {
      out.warnings.push_back(out.label + ": no " + std::string(metric_id(k)) + " table, metric skipped");
      continue;
    }
    const AggregationResult agg =
        k == MetricKind::anll ? train : aggregate_samples(run.train, *metric, n);
    const ScoringInputs inputs{agg.samples, {}, &run.manifest};
    out.metrics.push_back(outcome(std::string(metric_id(k)), rank_checkpoints(inputs, Strategy::ugcs, params)));
  }
  return out;
}

double paired_one_sided_p(const std::vector<double>& reference, const std::vector<double>& other) {
  if (reference.size() != other.size()) throw ConfigError("paired test needs equal-length samples");
  const std::size_t n = reference.size();
  if (n < 2) return 1.0;
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = other[i] - reference[i];
  double mean = 0.0;
  for (double x : d) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : d) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd == 0.0) return mean > 0.0 ? 0.0 : 1.0;
  const double t = mean / (sd / std::sqrt(static_cast<double>(n)));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  return boost::math::cdf(boost::math::complement(dist, t));
}

const SummaryRow* CompareSummary::find(const std::string& row) const {
  for (const auto& r : rows) {
    if (r.row == row) return &r;
  }
  return nullptr;
}

CompareSummary summarize(const std::vector<RunOutcome>& runs, bool metrics_table,
                         const std::string& reference) {
  CompareSummary summary;
  summary.reference = reference;
  if (runs.empty()) return summary;
  auto rows_of = [&](const RunOutcome& r) -> const std::vector<RowOutcome>& {
    return metrics_table ? r.metrics : r.strategies;
  };

  // Row order follows the first run; keep rows every run has.
  std::vector<std::string> names;
  for (const auto& row : rows_of(runs.front())) {
    const bool everywhere = std::all_of(runs.begin(), runs.end(), [&](const RunOutcome& r) {
      const auto& rs = rows_of(r);
      return std::any_of(rs.begin(), rs.end(), [&](const RowOutcome& o) { return o.row == row.row; });
    });
    if (everywhere) names.push_back(row.row);
  }

  std::map<std::string, std::vector<double>> regrets;
  std::map<std::string, std::size_t> wins;
  for (const auto& r : runs) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& o : rows_of(r)) {
      if (std::find(names.begin(), names.end(), o.row) != names.end()) {
        regrets[o.row].push_back(o.regret);
        best = std::min(best, o.regret);
      }
    }
    for (const auto& o : rows_of(r)) {
      if (o.regret == best && std::find(names.begin(), names.end(), o.row) != names.end()) ++wins[o.row];
    }
  }

  const auto ref = regrets.find(reference);
  for (const auto& name : names) {
    const auto& v = regrets[name];
    SummaryRow row;
    row.row = name;
    row.runs = v.size();
    double sum = 0.0;
    std::size_t hits = 0;
    for (double x : v) {
      sum += x;
      if (x == 0.0) ++hits;
    }
    row.mean_regret = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - row.mean_regret) * (x - row.mean_regret);
    row.sd_regret = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    row.win_rate = static_cast<double>(wins[name]) / static_cast<double>(v.size());
    row.hit_rate = static_cast<double>(hits) / static_cast<double>(v.size());
    if (ref != regrets.end() && name != reference) row.p_vs_reference = paired_one_sided_p(ref->second, v);
    summary.rows.push_back(row);
  }
  return summary;
}

}  // namespace ugcs
