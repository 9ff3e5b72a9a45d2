#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ugcs/difficulty.hpp"
#include "ugcs/records.hpp"
#include "ugcs/scoring.hpp"
#include "ugcs/synthetic.hpp"

namespace ugcs {

// Everything needed to judge selection strategies on one run.
struct RunInputs {
  std::string label;
  RunManifest manifest;
  std::vector<AnswerRecord> train;
  std::vector<AnswerRecord> validation;
  std::map<Step, double> truth;
  std::map<MetricKind, ScoreTable> pre_tables;
};

RunInputs run_inputs_from(SyntheticRun run, std::string label);

// Reads a directory laid out by write_run_directory. val.jsonl and the
// pre_*.json tables are optional; truth.csv is required.
RunInputs load_run_directory(const std::filesystem::path& dir);

struct RowOutcome {
  std::string row;  // strategy id or metric id
  Step winner = 0;
  double regret = 0.0;
};

struct RunOutcome {
  std::string label;
  std::vector<RowOutcome> strategies;  // one per strategy that could run
  std::vector<RowOutcome> metrics;     // UGCS under each available metric
  std::vector<std::string> warnings;
};

// Ranks every strategy (UGCS with ANLL) and UGCS under every metric.
// val_reward is skipped when there is no validation log, PRE_* metrics when
// their table is absent.
RunOutcome evaluate_run(const RunInputs& run, const ScoringParams& params);

// One-sided paired t-test of H1: mean(other - reference) > 0, i.e. the
// reference has lower values. Returns the p-value; 1 when every difference
// is zero, 0 when the differences are constant and positive.
double paired_one_sided_p(const std::vector<double>& reference, const std::vector<double>& other);

struct SummaryRow {
  std::string row;
  std::size_t runs = 0;
  double mean_regret = 0.0;
  double sd_regret = 0.0;
  double win_rate = 0.0;  // share of runs with the lowest regret in the table (ties count)
  double hit_rate = 0.0;  // share of runs with zero regret
  // Paired test that the reference row has lower regret than this row;
  // absent for the reference row itself.
  std::optional<double> p_vs_reference;
};

struct CompareSummary {
  std::string reference;
  std::vector<SummaryRow> rows;
  const SummaryRow* find(const std::string& row) const;
};

// Rows present in every run are summarized; others are dropped.
CompareSummary summarize(const std::vector<RunOutcome>& runs, bool metrics_table,
                         const std::string& reference);

}  // namespace ugcs
