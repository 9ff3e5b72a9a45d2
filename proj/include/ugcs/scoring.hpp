#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ugcs/records.hpp"

namespace ugcs {

enum class Strategy { ugcs, train_reward, val_reward, last_checkpoint, top_reward };

inline constexpr Strategy kAllStrategies[] = {Strategy::ugcs, Strategy::train_reward,
                                              Strategy::val_reward, Strategy::last_checkpoint,
                                              Strategy::top_reward};

std::string_view strategy_id(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view id);

/// Aggregated samples for one checkpoint, steps in [checkpoint - delta, checkpoint).
///
/// A view into a canonically sorted sample sequence; the window does not own
/// its samples. The lower bound is clamped at step 1.
struct Window {
  Step checkpoint_step = 0;
  Step delta = 0;
  std::span<const AggregatedSample> samples;

  Step first_step() const { return checkpoint_step - delta < 1 ? 1 : checkpoint_step - delta; }
  std::size_t size() const { return samples.size(); }
};

struct CheckpointScore {
  Step checkpoint_step = 0;
  Strategy strategy = Strategy::ugcs;
  double value = 0.0;
  // Samples averaged into `value`, in selection order. Empty for
  // last_checkpoint and val_reward.
  std::vector<SampleKey> selected_keys;
};

struct ScoringParams {
  double p = 10.0;   // percent in (0, 100]
  Step delta = 100;  // window length in steps, >= 1
};

// Throws ConfigError when p or delta is out of range.
void validate(const ScoringParams& params);

// k = max(1, ceil(p/100 * m)), never above m.
std::size_t top_k_count(double p, std::size_t m);

// `samples` must be sorted by key. Throws EmptyWindowError when no sample
// lands in the window.
Window extract_window(std::span<const AggregatedSample> samples, Step checkpoint_step, Step delta);

// Indices into window.samples of the k hardest samples, ordered by
// (difficulty desc, step asc, sample_id asc).
std::vector<std::size_t> select_top_hard_indices(const Window& window, double p);
std::vector<SampleKey> select_top_hard(const Window& window, double p);

// Mean mean_reward over the top-p% hardest samples.
CheckpointScore ugcs_score(const Window& window, double p);
// Mean mean_reward over the whole window.
CheckpointScore train_reward_score(const Window& window);
// Mean mean_reward over the top-p% highest-reward samples.
CheckpointScore top_reward_score(const Window& window, double p);
// Mean per-sample reward of validation samples logged at the checkpoint step.
// `validation` must be sorted by key; throws MissingValidationError.
CheckpointScore val_reward_score(std::span<const AggregatedSample> validation, Step checkpoint_step);
// 1 for the manifest's final checkpoint, 0 otherwise.
CheckpointScore last_checkpoint_score(const RunManifest& manifest, Step checkpoint_step);

// Everything a strategy may read when scoring a checkpoint.
struct ScoringInputs {
  std::span<const AggregatedSample> train;       // sorted by key
  std::span<const AggregatedSample> validation;  // sorted by key, may be empty
  const RunManifest* manifest = nullptr;
};

// Dispatches on `strategy`. Window-based strategies throw EmptyWindowError.
CheckpointScore score_checkpoint(Strategy strategy, const ScoringInputs& inputs,
                                 Step checkpoint_step, const ScoringParams& params);

// Number of validation samples logged for `checkpoint_step`.
std::size_t validation_size(std::span<const AggregatedSample> validation, Step checkpoint_step);

}  // namespace ugcs
