#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ugcs {

using Step = std::int64_t;

// Identifies one question at one training step. Ordering is the canonical
// report order: step ascending, then sample_id bytewise ascending.
struct SampleKey {
  Step step = 0;
  std::string sample_id;

  friend auto operator<=>(const SampleKey&, const SampleKey&) = default;
  friend bool operator==(const SampleKey&, const SampleKey&) = default;
};

struct SampleKeyHash {
  std::size_t operator()(const SampleKey& k) const noexcept {
    const std::size_t h = std::hash<std::string>{}(k.sample_id);
    return h ^ (std::hash<Step>{}(k.step) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  }
};

struct TokenLogprobs {
  std::vector<double> values;
};
struct SumLogprob {
  double value = 0.0;
};
using LogprobEvidence = std::variant<TokenLogprobs, SumLogprob>;

/// One generated answer for one question at one training step.
///
/// Log-probabilities are stored after clamping, so every value is <= 0.
struct AnswerRecord {
  Step step = 1;
  std::string sample_id;
  std::int64_t answer_index = 0;
  double reward = 0.0;
  std::int64_t num_tokens = 1;
  LogprobEvidence evidence = SumLogprob{};

  SampleKey key() const { return {step, sample_id}; }
};

/// Per (step, sample) aggregate over that question's answers.
///
/// `difficulty` is the per-sample difficulty under the metric used for
/// aggregation (mean per-answer ANLL by default), oriented higher = harder.
struct AggregatedSample {
  SampleKey key;
  double mean_reward = 0.0;
  double difficulty = 0.0;
  int n_answers = 0;
};

/// Training-run shape. Defaults: 8 answers
/// per question, batch of 8 questions, 1000 steps, a checkpoint every 100.
struct RunManifest {
  int n_per_question = 8;
  int batch_size = 8;
  Step total_steps = 1000;
  Step save_every = 100;
  int max_response_len = 1200;
  std::vector<Step> checkpoint_steps;
  // Which policy produced the logged log-probs, when the trainer says so.
  std::optional<std::string> logprob_phase;

  // save_every, 2*save_every, ... <= total_steps
  static std::vector<Step> default_checkpoints(Step total_steps, Step save_every);

  // Throws ConfigError on any invariant violation.
  void validate() const;

  Step last_checkpoint() const { return checkpoint_steps.back(); }
};

// Manifest with default fields and default checkpoint list.
RunManifest default_manifest();

}  // namespace ugcs
