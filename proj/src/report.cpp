#include "ugcs/report.hpp"

#include <ostream>

#include "ugcs/log_io.hpp"

namespace ugcs {
namespace {

ReportJson header(const ReportContext& ctx) {
  ReportJson j = ReportJson::object();
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = ctx.command;
  j["config"] = ctx.config;
  return j;
}

void footer(ReportJson& j, const ReportContext& ctx, const std::vector<std::string>& extra = {}) {
  if (!ctx.validation_sizes.empty()) {
    ReportJson sizes = ReportJson::array();
    for (const auto& [step, n] : ctx.validation_sizes) sizes.push_back({{"checkpoint_step", step}, {"samples", n}});
    j["validation_size"] = sizes;
  }
  ReportJson w = ReportJson::array();
  for (const auto& s : ctx.warnings) w.push_back(s);
  for (const auto& s : extra) w.push_back(s);
  j["warnings"] = w;
}

ReportJson ranking_json(const RankingReport& r) {
  ReportJson j = ReportJson::object();
  j["strategy"] = strategy_id(r.strategy);
  j["p"] = r.params.p;
  j["delta"] = r.params.delta;
  j["winner"] = r.winner;
  j["winner_value"] = r.winner_value;
  j["tie_policy_applied"] = r.tie_policy_applied;
  ReportJson scores = ReportJson::array();
  for (const auto& s : r.scores) scores.push_back(score_json(s));
  j["scores"] = scores;
  return j;
}

std::string optional_number(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace

void write_scores_csv(std::ostream& out, std::span<const CheckpointScore> scores) {
  out << "checkpoint_step,strategy,value\n";
  for (const auto& s : scores) {
    out << s.checkpoint_step << ',' << strategy_id(s.strategy) << ',' << format_double(s.value) << '\n';
  }
}

ReportJson score_json(const CheckpointScore& s) {
  ReportJson j = ReportJson::object();
  j["checkpoint_step"] = s.checkpoint_step;
  j["strategy"] = strategy_id(s.strategy);
  j["value"] = s.value;
  ReportJson keys = ReportJson::array();
  for (const auto& k : s.selected_keys) keys.push_back({{"step", k.step}, {"sample_id", k.sample_id}});
  j["selected_keys"] = keys;
  return j;
}

ReportJson scores_report(const ReportContext& ctx, Strategy strategy, std::span<const CheckpointScore> scores) {
  ReportJson j = header(ctx);
  j["strategy"] = strategy_id(strategy);
  ReportJson arr = ReportJson::array();
  for (const auto& s : scores) arr.push_back(score_json(s));
  j["scores"] = arr;
  footer(j, ctx);
  return j;
}

ReportJson ranking_report(const ReportContext& ctx, std::span<const RankingReport> rankings) {
  ReportJson j = header(ctx);
  ReportJson arr = ReportJson::array();
  std::vector<std::string> extra;
  for (const auto& r : rankings) {
    arr.push_back(ranking_json(r));
    for (const auto& w : r.warnings) extra.push_back(std::string(strategy_id(r.strategy)) + ": " + w);
  }
  j["rankings"] = arr;
  footer(j, ctx, extra);
  return j;
}

void write_sweep_csv(std::ostream& out, const SweepReport& sweep) {
  if (sweep.axis == SweepAxis::p) {
    out << "p,winner,winner_value,calibration_of_winner\n";
    for (const auto& e : sweep.entries) {
      out << format_double(e.axis_value) << ',' << e.ranking.winner << ',' << format_double(e.ranking.winner_value)
          << ',' << optional_number(e.calibration_of_winner) << '\n';
    }
  } else {
    out << "delta,winner,winner_value\n";
    for (const auto& e : sweep.entries) {
      out << static_cast<Step>(e.axis_value) << ',' << e.ranking.winner << ','
          << format_double(e.ranking.winner_value) << '\n';
    }
  }
}

ReportJson sweep_report(const ReportContext& ctx, const SweepReport& sweep) {
  ReportJson j = header(ctx);
  const bool p_axis = sweep.axis == SweepAxis::p;
  j["axis"] = p_axis ? "p" : "delta";
  ReportJson grid = ReportJson::array();
  ReportJson entries = ReportJson::array();
  std::vector<std::string> extra;
  for (const auto& e : sweep.entries) {
    if (p_axis) {
      grid.push_back(e.axis_value);
    } else {
      grid.push_back(static_cast<Step>(e.axis_value));
    }
    ReportJson row = ranking_json(e.ranking);
    if (e.calibration_of_winner) row["calibration_of_winner"] = *e.calibration_of_winner;
    entries.push_back(row);
    for (const auto& w : e.ranking.warnings) extra.push_back(w);
  }
  j["grid"] = grid;
  j["entries"] = entries;
  if (sweep.recommended) j["recommended"] = *sweep.recommended;
  j["winners_agree"] = sweep.winners_agree;
  j["recommended_p_by_model_strength"] = {{"weak", kRecommendedPWeak}, {"strong", kRecommendedPStrong}};
  footer(j, ctx, extra);
  return j;
}

void write_compare_csv(std::ostream& out, const CompareSummary& strategies, const CompareSummary& metrics) {
  out << "table,row,runs,mean_regret,sd_regret,win_rate,hit_rate,p_vs_reference\n";
  auto rows = [&](const char* table, const CompareSummary& s) {
    for (const auto& r : s.rows) {
      out << table << ',' << r.row << ',' << r.runs << ',' << format_double(r.mean_regret) << ','
          << format_double(r.sd_regret) << ',' << format_double(r.win_rate) << ',' << format_double(r.hit_rate)
          << ',' << optional_number(r.p_vs_reference) << '\n';
    }
  };
  rows("strategy", strategies);
  rows("metric", metrics);
}

ReportJson compare_report(const ReportContext& ctx, const CompareSummary& strategies,
                          const CompareSummary& metrics, std::span<const RunOutcome> runs) {
  ReportJson j = header(ctx);
  auto table = [](const CompareSummary& s) {
    ReportJson t = ReportJson::object();
    t["reference"] = s.reference;
    ReportJson rows = ReportJson::array();
    for (const auto& r : s.rows) {
      ReportJson row = {{"row", r.row},         {"runs", r.runs},         {"mean_regret", r.mean_regret},
                        {"sd_regret", r.sd_regret}, {"win_rate", r.win_rate}, {"hit_rate", r.hit_rate}};
      row["p_vs_reference"] = r.p_vs_reference ? ReportJson(*r.p_vs_reference) : ReportJson(nullptr);
      rows.push_back(row);
    }
    t["rows"] = rows;
    return t;
  };
  j["strategies"] = table(strategies);
  j["metrics"] = table(metrics);
  ReportJson per_run = ReportJson::array();
  std::vector<std::string> extra;
  for (const auto& r : runs) {
    ReportJson run = {{"label", r.label}};
    ReportJson winners = ReportJson::object();
    for (const auto& o : r.strategies) winners[o.row] = {{"winner", o.winner}, {"regret", o.regret}};
    run["strategies"] = winners;
    ReportJson mw = ReportJson::object();
    for (const auto& o : r.metrics) mw[o.row] = {{"winner", o.winner}, {"regret", o.regret}};
    run["metrics"] = mw;
    per_run.push_back(run);
    for (const auto& w : r.warnings) extra.push_back(w);
  }
  j["runs"] = per_run;
  footer(j, ctx, extra);
  return j;
}

void write_json(std::ostream& out, const ReportJson& j) { out << j.dump(2) << '\n'; }

}  // namespace ugcs
