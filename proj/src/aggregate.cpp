#include "ugcs/aggregate.hpp"

#include <algorithm>
#include <tuple>

#include "ugcs/errors.hpp"
#include "ugcs/kernels.hpp"

namespace ugcs {
namespace {
constexpr std::size_t kMaxWarnings = 20;
}

SampleAggregator::SampleAggregator(DifficultyMetric metric, int expected_answers)
    : metric_(std::move(metric)), expected_answers_(expected_answers) {}

void SampleAggregator::add(const AnswerRecord& record) {
  const double difficulty = metric_.precomputed() ? 0.0 : metric_.per_answer(record);
  groups_[record.key()].push_back({record.answer_index, record.reward, difficulty});
}

void SampleAggregator::merge(const SampleAggregator& other) {
  for (const auto& [key, answers] : other.groups_) {
    auto& dst = groups_[key];
    dst.insert(dst.end(), answers.begin(), answers.end());
  }
}

AggregationResult SampleAggregator::finalize() const {
  AggregationResult result;
  std::vector<const std::pair<const SampleKey, std::vector<Answer>>*> entries;
  entries.reserve(groups_.size());
  for (const auto& kv : groups_) entries.push_back(&kv);
  std::sort(entries.begin(), entries.end(), [](auto* a, auto* b) { return a->first < b->first; });

  result.samples.reserve(entries.size());
  std::vector<Answer> answers;
  std::vector<double> rewards, difficulties;
  for (const auto* entry : entries) {
    answers = entry->second;
    std::sort(answers.begin(), answers.end(), [](const Answer& a, const Answer& b) {
      return std::tie(a.index, a.reward, a.difficulty) < std::tie(b.index, b.reward, b.difficulty);
    });
    rewards.clear();
    difficulties.clear();
    for (const auto& a : answers) {
      rewards.push_back(a.reward);
      difficulties.push_back(a.difficulty);
    }
    AggregatedSample s;
    s.key = entry->first;
    s.n_answers = static_cast<int>(answers.size());
    s.mean_reward = kernels::mean(rewards);
    s.difficulty = metric_.precomputed() ? metric_.lookup(s.key.sample_id) : kernels::mean(difficulties);
    if (expected_answers_ > 0 && s.n_answers != expected_answers_) {
      ++result.incomplete_samples;
      if (result.warnings.size() < kMaxWarnings) {
        result.warnings.push_back("sample '" + s.key.sample_id + "' at step " +
                                  std::to_string(s.key.step) + " has " +
                                  std::to_string(s.n_answers) + " answers, expected " +
                                  std::to_string(expected_answers_));
      }
    }
    result.samples.push_back(std::move(s));
  }
  return result;
}

AggregationResult aggregate_samples(std::span<const AnswerRecord> records,
                                    const DifficultyMetric& metric, int expected_answers) {
  if (records.empty()) throw EmptyInputError("no answer records to aggregate");
  SampleAggregator agg(metric, expected_answers);
  for (const auto& r : records) agg.add(r);
  return agg.finalize();
}

}  // namespace ugcs
