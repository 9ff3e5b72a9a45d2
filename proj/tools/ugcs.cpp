// ugcs: score, rank and compare RL-finetuning checkpoints from training logs.

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ugcs/aggregate.hpp"
#include "ugcs/compare.hpp"
#include "ugcs/errors.hpp"
#include "ugcs/log_io.hpp"
#include "ugcs/report.hpp"
#include "ugcs/selection.hpp"
#include "ugcs/synthetic.hpp"
#include "ugcs/watch.hpp"

namespace {

using namespace ugcs;

// Reads `--config` files as a flat JSON object of option values. Keys are
// option long names; snake_case is accepted for kebab-case options.
class JsonConfig : public CLI::Config {
 public:
  // Items are attributed to this subcommand.
  explicit JsonConfig(std::string section) : section_(std::move(section)) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return {}; }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config file: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : j.items()) {
      CLI::ConfigItem item;
      if (!section_.empty()) item.parents = {section_};
      item.name = key;
      std::replace(item.name.begin(), item.name.end(), '_', '-');
      auto text = [](const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(text(v));
      } else if (value.is_object() || value.is_null()) {
        throw CLI::ConversionError("config key '" + key + "' must be a scalar or a list");
      } else {
        item.inputs.push_back(text(value));
      }
      items.push_back(std::move(item));
    }
    return items;
  }

 private:
  std::string section_;
};

struct Common {
  std::vector<std::string> logs;
  std::string manifest;
  std::string val_log;
  std::string strategy = "ugcs";
  std::optional<double> p;
  std::string model_strength = "strong";
  Step delta = 100;
  std::string metric = "anll";
  std::string table;
  std::string orientation = "higher_harder";
  std::string out_csv;
  std::string out_json;
};

void add_outputs(CLI::App* sub, Common& c) {
  sub->add_option("--out-csv", c.out_csv, "Write the CSV report here");
  sub->add_option("--out-json", c.out_json, "Write the JSON report here");
}

void add_scoring(CLI::App* sub, Common& c, bool with_strategy) {
  if (with_strategy) sub->add_option("--strategy", c.strategy, "ugcs, train_reward, val_reward, last_checkpoint, top_reward");
  sub->add_option("--p", c.p, "Percent of hardest samples, in (0, 100]");
  sub->add_option("--model-strength", c.model_strength, "weak (p=3) or strong (p=10), used when --p is absent")
      ->check(CLI::IsMember({"weak", "strong"}));
  sub->add_option("--delta", c.delta, "Training window in steps");
  sub->add_option("--difficulty-metric", c.metric, "anll, nll, pre_anll, pre_nll, pre_consistency");
  sub->add_option("--precomputed-table", c.table, "JSON sample_id -> difficulty, for pre_* metrics");
  sub->add_option("--table-orientation", c.orientation, "higher_harder or higher_easier")
      ->check(CLI::IsMember({"higher_harder", "higher_easier"}));
}

void add_inputs(CLI::App* sub, Common& c, bool multiple_logs = true) {
  auto* log = sub->add_option("--log", c.logs, multiple_logs ? "Training log (repeatable)" : "Training log file or directory");
  log->required();
  if (!multiple_logs) log->expected(1);
  sub->add_option("--manifest", c.manifest, "Run manifest JSON (default: 1000 steps, checkpoint every 100)");
  sub->add_option("--val-log", c.val_log, "Validation log");
}

double effective_p(const Common& c) {
  if (c.p) return *c.p;
  return c.model_strength == "weak" ? kRecommendedPWeak : kRecommendedPStrong;
}

Strategy strategy_of(const std::string& id) {
  auto s = parse_strategy(id);
  if (!s) throw ConfigError("unknown strategy '" + id + "'");
  return *s;
}

MetricKind metric_of(const std::string& id) {
  auto k = parse_metric_kind(id);
  if (!k) throw ConfigError("unknown difficulty metric '" + id + "'");
  return *k;
}

// Flag-level checks that need no I/O.
ScoringParams check_common(const Common& c) {
  const ScoringParams params{effective_p(c), c.delta};
  validate(params);
  const MetricKind kind = metric_of(c.metric);
  if (is_precomputed(kind) && c.table.empty()) {
    throw ConfigError("--difficulty-metric " + c.metric + " needs --precomputed-table");
  }
  if (!is_precomputed(kind) && !c.table.empty()) {
    throw ConfigError("--precomputed-table only applies to pre_* metrics");
  }
  return params;
}

DifficultyMetric load_metric(const Common& c) {
  const MetricKind kind = metric_of(c.metric);
  if (!is_precomputed(kind)) return DifficultyMetric::on_the_fly(kind);
  if (!std::filesystem::exists(c.table)) {
    throw MissingPrecomputedScoreError("precomputed table not found: " + c.table);
  }
  const auto orientation =
      c.orientation == "higher_easier" ? TableOrientation::higher_easier : TableOrientation::higher_harder;
  return DifficultyMetric::precomputed(kind, load_score_table_file(c.table, orientation));
}

RunManifest load_manifest_or_default(const Common& c) {
  if (c.manifest.empty()) return default_manifest();
  return load_manifest(c.manifest);
}

struct Loaded {
  RunManifest manifest;
  AggregationResult train;
  std::vector<AggregatedSample> validation;
  std::map<Step, std::size_t> validation_sizes;
  std::vector<std::string> warnings;
};

std::vector<AnswerRecord> read_logs(const std::vector<std::string>& paths, const ParseOptions& opts) {
  std::vector<AnswerRecord> all;
  for (const auto& p : paths) {
    auto part = read_log_file(p, opts);
    all.insert(all.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  if (paths.size() > 1) {
    // Shards are checked per file on read; check across files here.
    std::vector<const AnswerRecord*> order;
    order.reserve(all.size());
    for (const auto& r : all) order.push_back(&r);
    auto key = [](const AnswerRecord* r) { return std::tie(r->step, r->sample_id, r->answer_index); };
    std::sort(order.begin(), order.end(), [&](auto* a, auto* b) { return key(a) < key(b); });
    for (std::size_t i = 1; i < order.size(); ++i) {
      if (key(order[i]) == key(order[i - 1])) {
        throw DuplicateKeyError("duplicate (step " + std::to_string(order[i]->step) + ", sample_id '" +
                                    order[i]->sample_id + "', answer_index " +
                                    std::to_string(order[i]->answer_index) + ") across log files",
                                0);
      }
    }
  }
  return all;
}

Loaded load_inputs(const Common& c, const DifficultyMetric& metric) {
  Loaded out;
  out.manifest = load_manifest_or_default(c);
  const auto opts = ParseOptions::for_manifest(out.manifest);
  const auto records = read_logs(c.logs, opts);
  out.train = aggregate_samples(records, metric, out.manifest.n_per_question);
  out.warnings = out.train.warnings;
  if (out.train.incomplete_samples > 0) {
    out.warnings.push_back(std::to_string(out.train.incomplete_samples) + " training samples with an answer count other than " +
                           std::to_string(out.manifest.n_per_question));
  }
  if (!c.val_log.empty()) {
    const auto val = read_log_file(c.val_log, opts);
    if (!val.empty()) {
      auto agg = aggregate_samples(val, DifficultyMetric::on_the_fly(MetricKind::anll), out.manifest.n_per_question);
      out.validation = std::move(agg.samples);
    }
    for (Step cp : out.manifest.checkpoint_steps) out.validation_sizes[cp] = validation_size(out.validation, cp);
  }
  return out;
}

ReportJson common_config(const Common& c, const ScoringParams& params) {
  ReportJson j = ReportJson::object();
  j["log"] = c.logs;
  j["manifest"] = c.manifest.empty() ? ReportJson(nullptr) : ReportJson(c.manifest);
  j["val_log"] = c.val_log.empty() ? ReportJson(nullptr) : ReportJson(c.val_log);
  j["p"] = params.p;
  j["model_strength"] = c.model_strength;
  j["delta"] = params.delta;
  j["difficulty_metric"] = c.metric;
  j["precomputed_table"] = c.table.empty() ? ReportJson(nullptr) : ReportJson(c.table);
  j["table_orientation"] = c.orientation;
  return j;
}

void emit(const Common& c, const ReportJson& json, const std::function<void(std::ostream&)>& csv) {
  auto open = [](const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    return out;
  };
  if (!c.out_csv.empty()) {
    auto out = open(c.out_csv);
    csv(out);
  }
  if (!c.out_json.empty()) {
    auto out = open(c.out_json);
    write_json(out, json);
  }
  if (c.out_csv.empty() && c.out_json.empty()) csv(std::cout);
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_score(const Common& c) {
  const auto params = check_common(c);
  const Strategy strategy = strategy_of(c.strategy);
  const auto metric = load_metric(c);
  Loaded in = load_inputs(c, metric);
  const ScoringInputs inputs{in.train.samples, in.validation, &in.manifest};
  const RankingReport r = rank_checkpoints(inputs, strategy, params);
  ReportContext ctx{"score", common_config(c, params), in.warnings, in.validation_sizes};
  ctx.config["strategy"] = c.strategy;
  for (const auto& w : r.warnings) ctx.warnings.push_back(w);
  print_warnings(ctx.warnings);
  emit(c, scores_report(ctx, strategy, r.scores), [&](std::ostream& o) { write_scores_csv(o, r.scores); });
  return 0;
}

int cmd_rank(const Common& c, const std::vector<std::string>& strategies) {
  const auto params = check_common(c);
  std::vector<Strategy> chosen;
  for (const auto& id : strategies) chosen.push_back(strategy_of(id));
  const bool explicit_list = !chosen.empty();
  if (!explicit_list) chosen.assign(std::begin(kAllStrategies), std::end(kAllStrategies));
  const auto metric = load_metric(c);
  Loaded in = load_inputs(c, metric);
  const ScoringInputs inputs{in.train.samples, in.validation, &in.manifest};
  std::vector<RankingReport> reports;
  for (Strategy s : chosen) {
    if (s == Strategy::val_reward && in.validation.empty() && !explicit_list) {
      in.warnings.push_back("no validation log, val_reward skipped");
      continue;
    }
    reports.push_back(rank_checkpoints(inputs, s, params));
  }
  ReportContext ctx{"rank", common_config(c, params), in.warnings, in.validation_sizes};
  ReportJson ids = ReportJson::array();
  for (const auto& r : reports) ids.push_back(strategy_id(r.strategy));
  ctx.config["strategies"] = ids;
  const ReportJson json = ranking_report(ctx, reports);
  print_warnings(json["warnings"].get<std::vector<std::string>>());
  for (const auto& r : reports) {
    std::cerr << strategy_id(r.strategy) << ": winner " << r.winner << " (" << format_double(r.winner_value) << ")"
              << (r.tie_policy_applied ? ", earliest of tied checkpoints" : "") << '\n';
  }
  emit(c, json, [&](std::ostream& o) {
    std::vector<CheckpointScore> all;
    for (const auto& r : reports) all.insert(all.end(), r.scores.begin(), r.scores.end());
    write_scores_csv(o, all);
  });
  return 0;
}

int cmd_sweep_p(const Common& c, const std::string& calibration, std::vector<double> grid) {
  const auto params = check_common(c);
  if (grid.empty()) grid = default_p_grid();
  // Grid checks run before any file is touched.
  for (std::size_t i = 0; i < grid.size(); ++i) {
    validate(ScoringParams{grid[i], params.delta});
    if (i > 0 && !(grid[i - 1] < grid[i])) throw ConfigError("--p-grid must be strictly ascending");
  }
  if (!std::filesystem::exists(calibration)) {
    throw MissingCalibrationError("calibration table not found: " + calibration);
  }
  const auto cal_map = load_step_table_csv(calibration);
  const CalibrationTable cal(cal_map.begin(), cal_map.end());
  const auto metric = load_metric(c);
  Loaded in = load_inputs(c, metric);
  const ScoringInputs inputs{in.train.samples, in.validation, &in.manifest};
  const SweepReport sweep = sweep_p(inputs, grid, cal, params.delta);
  ReportContext ctx{"sweep-p", common_config(c, params), in.warnings, in.validation_sizes};
  ctx.config["calibration"] = calibration;
  ctx.config["p_grid"] = grid;
  ctx.config.erase("p");
  print_warnings(ctx.warnings);
  std::cerr << "recommended p: " << format_double(*sweep.recommended) << '\n';
  emit(c, sweep_report(ctx, sweep), [&](std::ostream& o) { write_sweep_csv(o, sweep); });
  return 0;
}

int cmd_sweep_delta(const Common& c, std::vector<Step> grid) {
  const auto params = check_common(c);
  const Strategy strategy = strategy_of(c.strategy);
  if (grid.empty()) grid = default_delta_grid();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 1) throw ConfigError("--delta-grid values must be >= 1");
    if (i > 0 && !(grid[i - 1] < grid[i])) throw ConfigError("--delta-grid must be strictly ascending");
  }
  const auto metric = load_metric(c);
  Loaded in = load_inputs(c, metric);
  const ScoringInputs inputs{in.train.samples, in.validation, &in.manifest};
  const SweepReport sweep = sweep_delta(inputs, grid, strategy, params);
  ReportContext ctx{"sweep-delta", common_config(c, params), in.warnings, in.validation_sizes};
  ctx.config["strategy"] = c.strategy;
  ctx.config["delta_grid"] = grid;
  ctx.config.erase("delta");
  print_warnings(ctx.warnings);
  std::cerr << "winners " << (sweep.winners_agree ? "agree" : "differ") << " across delta\n";
  emit(c, sweep_report(ctx, sweep), [&](std::ostream& o) { write_sweep_csv(o, sweep); });
  return 0;
}

struct WatchFlags {
  double poll_interval = 2.0;
  bool once = false;
  double idle_exit = 0.0;
};

int cmd_watch(const Common& c, const WatchFlags& w) {
  const auto params = check_common(c);
  const Strategy strategy = strategy_of(c.strategy);
  if (!(w.poll_interval > 0.0)) throw ConfigError("--poll-interval must be > 0");
  if (w.idle_exit < 0.0) throw ConfigError("--idle-exit must be >= 0");
  const auto metric = load_metric(c);
  const RunManifest manifest = load_manifest_or_default(c);
  std::vector<AggregatedSample> validation;
  if (!c.val_log.empty()) {
    const auto val = read_log_file(c.val_log, ParseOptions::for_manifest(manifest));
    if (!val.empty()) {
      validation = aggregate_samples(val, DifficultyMetric::on_the_fly(MetricKind::anll), manifest.n_per_question).samples;
    }
  }
  WatchSession session(c.logs.front(), manifest, strategy, params, metric, validation);

  auto print = [](const std::vector<BestChanged>& events) {
    for (const auto& e : events) {
      ReportJson j = ReportJson::object();
      j["event"] = "best_changed";
      j["step"] = e.step;
      j["value"] = e.value;
      std::cout << j.dump() << '\n';
    }
    std::cout.flush();
  };

  if (!w.once) {
    const auto interval = std::chrono::duration<double>(w.poll_interval);
    auto last_growth = std::chrono::steady_clock::now();
    while (!session.selector().done()) {
      const std::size_t before = session.records_seen();
      print(session.poll());
      const auto now = std::chrono::steady_clock::now();
      if (session.records_seen() != before) last_growth = now;
      if (w.idle_exit > 0.0 && std::chrono::duration<double>(now - last_growth).count() >= w.idle_exit) break;
      if (session.selector().done()) break;
      std::this_thread::sleep_for(interval);
    }
  }
  print(session.finish());

  const auto& sel = session.selector();
  ReportContext ctx{"watch", common_config(c, params), sel.warnings(), {}};
  ctx.config["strategy"] = c.strategy;
  ctx.config["poll_interval"] = w.poll_interval;
  print_warnings(ctx.warnings);
  if (auto best = sel.best()) {
    std::cerr << "best checkpoint " << best->checkpoint_step << " (" << format_double(best->value) << ") after "
              << session.records_seen() << " records\n";
  } else {
    throw NoScorableCheckpointError("no checkpoint could be scored from the watched log");
  }
  if (!c.out_csv.empty() || !c.out_json.empty()) {
    emit(c, scores_report(ctx, strategy, sel.scores()), [&](std::ostream& o) { write_scores_csv(o, sel.scores()); });
  }
  return 0;
}

struct SimFlags {
  std::string sim_config;
  std::string preset = "default";
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::size_t seeds = 100;
  std::uint64_t seed_start = 0;
  std::vector<std::string> run_dirs;
};

SyntheticRunConfig sim_config_of(const SimFlags& s) {
  SyntheticRunConfig cfg = synthetic_preset(s.preset);
  if (!s.sim_config.empty()) {
    std::ifstream in(s.sim_config);
    if (!in) throw ConfigError("cannot open " + s.sim_config);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("synthetic config: " + std::string(e.what()));
    }
    // Keys in the file override the preset.
    nlohmann::json merged = synthetic_config_to_json(cfg);
    if (!j.is_object()) throw ConfigError("synthetic config must be a JSON object");
    for (const auto& [k, v] : j.items()) {
      if (!merged.contains(k)) throw ConfigError("synthetic config: unknown key '" + k + "'");
      merged[k] = v;
    }
    cfg = synthetic_config_from_json(merged);
  }
  cfg.validate();
  return cfg;
}

int cmd_simulate(const SimFlags& s) {
  if (s.out_dir.empty()) throw ConfigError("--out-dir is required");
  SyntheticRunConfig cfg = sim_config_of(s);
  if (s.seed) cfg.seed = *s.seed;
  const SyntheticRun run = generate_run(cfg);
  write_run_directory(run, s.out_dir);
  std::cerr << "wrote " << run.train.size() << " training and " << run.validation.size()
            << " validation records to " << s.out_dir << '\n';
  if (auto p = cfg.planted_p()) std::cerr << "planted p: " << format_double(*p) << '\n';
  return 0;
}

int cmd_compare(const Common& c, const SimFlags& s) {
  const ScoringParams params{effective_p(c), c.delta};
  validate(params);
  if (s.run_dirs.empty() && s.seeds == 0) throw ConfigError("--seeds must be >= 1");
  std::vector<RunOutcome> outcomes;
  ReportJson config = ReportJson::object();
  config["p"] = params.p;
  config["model_strength"] = c.model_strength;
  config["delta"] = params.delta;
  if (!s.run_dirs.empty()) {
    config["run_dirs"] = s.run_dirs;
    for (const auto& dir : s.run_dirs) outcomes.push_back(evaluate_run(load_run_directory(dir), params));
  } else {
    const SyntheticRunConfig base = sim_config_of(s);
    config["preset"] = s.preset;
    config["sim_config"] = s.sim_config.empty() ? ReportJson(nullptr) : ReportJson(s.sim_config);
    config["seeds"] = s.seeds;
    config["seed_start"] = s.seed_start;
    config["synthetic"] = synthetic_config_to_json(base);
    config["synthetic"].erase("seed");
    for (std::size_t i = 0; i < s.seeds; ++i) {
      SyntheticRunConfig cfg = base;
      cfg.seed = s.seed_start + i;
      outcomes.push_back(evaluate_run(run_inputs_from(generate_run(cfg), "seed " + std::to_string(cfg.seed)), params));
    }
  }
  const CompareSummary strategies = summarize(outcomes, false, "ugcs");
  const CompareSummary metrics = summarize(outcomes, true, "anll");
  ReportContext ctx{"compare", config, {}, {}};
  const ReportJson json = compare_report(ctx, strategies, metrics, outcomes);
  print_warnings(json["warnings"].get<std::vector<std::string>>());
  emit(c, json, [&](std::ostream& o) { write_compare_csv(o, strategies, metrics); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Checkpoint selection from RL-finetuning training logs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ugcs 1.0.0");
  // --config may follow the subcommand; its keys apply to that subcommand.
  app.fallthrough();
  std::string section;
  for (int i = 1; i < argc && section.empty(); ++i) {
    const std::string arg = argv[i];
    for (const char* name : {"score", "rank", "sweep-p", "sweep-delta", "watch", "simulate", "compare"}) {
      if (arg == name) section = arg;
    }
  }
  app.config_formatter(std::make_shared<JsonConfig>(section));
  app.set_config("--config", "", "JSON file of option defaults; command-line flags win");

  Common c;
  std::vector<std::string> rank_strategies;
  std::string calibration;
  std::vector<double> p_grid;
  std::vector<Step> delta_grid;
  WatchFlags watch;
  SimFlags sim;

  auto* score = app.add_subcommand("score", "Score every checkpoint with one strategy");
  add_inputs(score, c);
  add_scoring(score, c, true);
  add_outputs(score, c);

  auto* rank = app.add_subcommand("rank", "Rank checkpoints under one or more strategies");
  add_inputs(rank, c);
  add_scoring(rank, c, false);
  rank->add_option("--strategy", rank_strategies, "Strategy to rank (repeatable; default: all)");
  add_outputs(rank, c);

  auto* sp = app.add_subcommand("sweep-p", "UGCS winner for each p, judged on a calibration table");
  add_inputs(sp, c);
  add_scoring(sp, c, false);
  sp->add_option("--calibration", calibration, "CSV checkpoint_step,score")->required();
  sp->add_option("--p-grid", p_grid, "p values (default 1..20)")->delimiter(',');
  add_outputs(sp, c);

  auto* sd = app.add_subcommand("sweep-delta", "Ranking for each training-window length");
  add_inputs(sd, c);
  add_scoring(sd, c, true);
  sd->add_option("--delta-grid", delta_grid, "delta values (default 10,20,50,100)")->delimiter(',');
  add_outputs(sd, c);

  auto* wt = app.add_subcommand("watch", "Follow a growing log and report best-so-far checkpoints");
  add_inputs(wt, c, false);
  add_scoring(wt, c, true);
  wt->add_option("--poll-interval", watch.poll_interval, "Seconds between polls");
  wt->add_flag("--once", watch.once, "Process what exists now and stop");
  wt->add_option("--idle-exit", watch.idle_exit, "Stop after this many seconds without new records (0: never)");
  add_outputs(wt, c);

  auto* simulate = app.add_subcommand("simulate", "Write a synthetic run directory");
  simulate->add_option("--preset", sim.preset, "default, stationary or planted_p");
  simulate->add_option("--sim-config", sim.sim_config, "Synthetic run config JSON (overrides the preset)");
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("--out-dir", sim.out_dir, "Output directory")->required();

  auto* compare = app.add_subcommand("compare", "Regret of every strategy and difficulty metric");
  compare->add_option("--preset", sim.preset, "Synthetic preset");
  compare->add_option("--sim-config", sim.sim_config, "Synthetic run config JSON");
  compare->add_option("--seeds", sim.seeds, "Number of synthetic runs");
  compare->add_option("--seed-start", sim.seed_start, "First seed");
  compare->add_option("--run-dir", sim.run_dirs, "Existing run directory with truth.csv (repeatable)");
  compare->add_option("--p", c.p, "Percent of hardest samples");
  compare->add_option("--model-strength", c.model_strength, "weak or strong")->check(CLI::IsMember({"weak", "strong"}));
  compare->add_option("--delta", c.delta, "Training window in steps");
  add_outputs(compare, c);

  app.allow_config_extras(CLI::config_extras_mode::error);
  for (auto* sub : app.get_subcommands({})) sub->allow_config_extras(CLI::config_extras_mode::error);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorCategory::usage);
  }

  try {
    if (*score) return cmd_score(c);
    if (*rank) return cmd_rank(c, rank_strategies);
    if (*sp) return cmd_sweep_p(c, calibration, p_grid);
    if (*sd) return cmd_sweep_delta(c, delta_grid);
    if (*wt) return cmd_watch(c, watch);
    if (*simulate) return cmd_simulate(sim);
    if (*compare) return cmd_compare(c, sim);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorCategory::usage);
  }
  return static_cast<int>(ErrorCategory::usage);
}
