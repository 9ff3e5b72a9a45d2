#pragma once

// CSV and JSON renderings of scores, rankings, sweeps and comparisons.
// JSON reports carry schema_version and the effective configuration.

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "ugcs/compare.hpp"
#include "ugcs/scoring.hpp"
#include "ugcs/selection.hpp"

namespace ugcs {

inline constexpr int kReportSchemaVersion = 1;

using ReportJson = nlohmann::ordered_json;

// `checkpoint_step,strategy,value`, one row per score.
void write_scores_csv(std::ostream& out, std::span<const CheckpointScore> scores);

ReportJson score_json(const CheckpointScore& score);

struct ReportContext {
  std::string command;
  ReportJson config = ReportJson::object();
  std::vector<std::string> warnings;
  // Validation samples per checkpoint, when a validation log was given.
  std::map<Step, std::size_t> validation_sizes;
};

ReportJson scores_report(const ReportContext& ctx, Strategy strategy, std::span<const CheckpointScore> scores);
ReportJson ranking_report(const ReportContext& ctx, std::span<const RankingReport> rankings);

// p sweep: `p,winner,winner_value,calibration_of_winner`;
// delta sweep: `delta,winner,winner_value`.
void write_sweep_csv(std::ostream& out, const SweepReport& sweep);
ReportJson sweep_report(const ReportContext& ctx, const SweepReport& sweep);

// `table,row,runs,mean_regret,sd_regret,win_rate,hit_rate,p_vs_reference`
void write_compare_csv(std::ostream& out, const CompareSummary& strategies, const CompareSummary& metrics);
ReportJson compare_report(const ReportContext& ctx, const CompareSummary& strategies,
                          const CompareSummary& metrics, std::span<const RunOutcome> runs);

// Pretty-printed with a trailing newline.
void write_json(std::ostream& out, const ReportJson& j);

}  // namespace ugcs
