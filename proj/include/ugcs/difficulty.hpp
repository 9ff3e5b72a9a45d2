#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ugcs/records.hpp"

namespace ugcs {

enum class MetricKind { anll, nll, pre_anll, pre_nll, pre_consistency };

inline constexpr MetricKind kAllMetrics[] = {MetricKind::anll, MetricKind::nll, MetricKind::pre_anll,
                                             MetricKind::pre_nll, MetricKind::pre_consistency};

std::string_view metric_id(MetricKind kind);
std::optional<MetricKind> parse_metric_kind(std::string_view id);
constexpr bool is_precomputed(MetricKind k) { return k != MetricKind::anll && k != MetricKind::nll; }

// sample_id -> static difficulty, higher = harder.
using ScoreTable = std::unordered_map<std::string, double>;

enum class TableOrientation { higher_harder, higher_easier };

/// Difficulty source used to rank samples inside a window.
///
/// ANLL and NLL are computed on the fly from each step's logged answers.
/// The PRE_* kinds carry a table fixed before training, so a sample has the
/// same difficulty at every step.
class DifficultyMetric {
 public:
  static DifficultyMetric on_the_fly(MetricKind kind);
  static DifficultyMetric precomputed(MetricKind kind, ScoreTable table);

  DifficultyMetric() : DifficultyMetric(on_the_fly(MetricKind::anll)) {}

  MetricKind kind() const noexcept { return kind_; }
  bool precomputed() const noexcept { return is_precomputed(kind_); }

  // ANLL or NLL of one answer; only meaningful for on-the-fly kinds.
  double per_answer(const AnswerRecord& record) const;

  // Throws MissingPrecomputedScoreError when the table has no entry.
  double lookup(const std::string& sample_id) const;

  const ScoreTable* table() const noexcept { return table_.get(); }

 private:
  DifficultyMetric(MetricKind kind, std::shared_ptr<const ScoreTable> table)
      : kind_(kind), table_(std::move(table)) {}

  MetricKind kind_;
  std::shared_ptr<const ScoreTable> table_;
};

// Sum of token log-probabilities (<= 0 for valid records).
double total_logprob(const AnswerRecord& record);

// Average negative log-likelihood: -(1/T) * sum_t log p(a^t | a^<t, s).
double anll(const AnswerRecord& record);

// Negative log-likelihood, defined as anll(record) * T.
double nll(const AnswerRecord& record);

// Population variance of correctness bits, q(1 - q). Needs >= 2 bits.
double consistency_score(std::span<const int> correctness_bits);

// One q(1 - q) entry per sample from an external model's generations.
ScoreTable build_consistency_table(const std::map<std::string, std::vector<int>>& generations);

// Difficulty of one (step, sample): mean per-answer metric over `answers`
// summed in answer_index order, or the static table value for PRE_* kinds.
double sample_difficulty(const SampleKey& key, std::span<const AnswerRecord> answers,
                         const DifficultyMetric& metric);

// JSON object {"sample_id": difficulty, ...}. Orientation is normalized to
// higher = harder on load. Throws ConfigError on malformed input.
ScoreTable load_score_table(std::istream& in,
                            TableOrientation orientation = TableOrientation::higher_harder);
ScoreTable load_score_table_file(const std::string& path,
                                 TableOrientation orientation = TableOrientation::higher_harder);
void save_score_table(std::ostream& out, const ScoreTable& table);

}  // namespace ugcs
