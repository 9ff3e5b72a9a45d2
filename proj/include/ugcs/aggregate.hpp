#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ugcs/difficulty.hpp"
#include "ugcs/records.hpp"

namespace ugcs {

struct AggregationResult {
  // Sorted by key (step, then sample_id).
  std::vector<AggregatedSample> samples;
  // Samples whose answer count differs from the expected N.
  std::size_t incomplete_samples = 0;
  // First few human-readable warnings; the count above is authoritative.
  std::vector<std::string> warnings;
};

/// Incremental group-by over (step, sample_id).
///
/// Per-answer difficulties are computed as records arrive, so token arrays
/// need not be retained. Means are taken over answers sorted by
/// answer_index, which makes the result independent of arrival order and
/// of how the input was chunked.
class SampleAggregator {
 public:
  explicit SampleAggregator(DifficultyMetric metric, int expected_answers = 0);

  void add(const AnswerRecord& record);

  // Folds in another aggregator's answers, e.g. from a disjoint log shard.
  void merge(const SampleAggregator& other);

  std::size_t size() const noexcept { return groups_.size(); }
  bool empty() const noexcept { return groups_.empty(); }
  void clear() { groups_.clear(); }

  // Throws MissingPrecomputedScoreError for PRE_* metrics lacking an entry.
  AggregationResult finalize() const;

  const DifficultyMetric& metric() const noexcept { return metric_; }

 private:
  struct Answer {
    std::int64_t index;
    double reward;
    double difficulty;
  };

  DifficultyMetric metric_;
  int expected_answers_;
  std::unordered_map<SampleKey, std::vector<Answer>, SampleKeyHash> groups_;
};

// Throws EmptyInputError when `records` is empty.
AggregationResult aggregate_samples(std::span<const AnswerRecord> records,
                                    const DifficultyMetric& metric, int expected_answers = 0);

}  // namespace ugcs
