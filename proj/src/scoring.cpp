#include "ugcs/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ugcs/errors.hpp"
#include "ugcs/kernels.hpp"
#include "ugcs/log_io.hpp"

namespace ugcs {
namespace {

struct StepLess {
  bool operator()(const AggregatedSample& s, Step step) const { return s.key.step < step; }
  bool operator()(Step step, const AggregatedSample& s) const { return step < s.key.step; }
};

std::span<const AggregatedSample> step_range(std::span<const AggregatedSample> samples, Step lo,
                                             Step hi_exclusive) {
  auto first = std::lower_bound(samples.begin(), samples.end(), lo, StepLess{});
  auto last = std::lower_bound(first, samples.end(), hi_exclusive, StepLess{});
  return {first, last};
}

// Mean reward over window indices, accumulated in canonical (index) order so
// that equal subsets give bit-equal means whatever order selected them.
double mean_reward_of(const Window& w, std::vector<std::size_t> indices) {
  std::sort(indices.begin(), indices.end());
  std::vector<double> rewards;
  rewards.reserve(indices.size());
  for (std::size_t i : indices) rewards.push_back(w.samples[i].mean_reward);
  return kernels::mean(rewards);
}

std::vector<SampleKey> keys_of(const Window& w, const std::vector<std::size_t>& indices) {
  std::vector<SampleKey> keys;
  keys.reserve(indices.size());
  for (std::size_t i : indices) keys.push_back(w.samples[i].key);
  return keys;
}

void require_nonempty(const Window& w) {
  if (w.samples.empty()) {
    throw EmptyWindowError("empty window for checkpoint " + std::to_string(w.checkpoint_step));
  }
}

template <typename Value>
std::vector<std::size_t> top_by(const Window& w, double p, Value value) {
  require_nonempty(w);
  const std::size_t k = top_k_count(p, w.samples.size());
  std::vector<std::size_t> idx(w.samples.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Samples are in key order, so index order breaks ties by (step, sample_id).
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double va = value(w.samples[a]);
                      const double vb = value(w.samples[b]);
                      if (va != vb) return va > vb;
                      return a < b;
                    });
  idx.resize(k);
  return idx;
}

}  // namespace

std::string_view strategy_id(Strategy s) {
  switch (s) {
    case Strategy::ugcs: return "ugcs";
    case Strategy::train_reward: return "train_reward";
    case Strategy::val_reward: return "val_reward";
    case Strategy::last_checkpoint: return "last_checkpoint";
    case Strategy::top_reward: return "top_reward";
  }
  return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view id) {
  for (Strategy s : kAllStrategies) {
    if (strategy_id(s) == id) return s;
  }
  return std::nullopt;
}

void validate(const ScoringParams& params) {
  if (!(params.p > 0.0 && params.p <= 100.0)) {
    throw ConfigError("p must be in (0, 100], got " + format_double(params.p));
  }
  if (params.delta < 1) throw ConfigError("delta must be >= 1, got " + std::to_string(params.delta));
}

std::size_t top_k_count(double p, std::size_t m) {
  if (m == 0) return 0;
  const double raw = std::ceil(p * static_cast<double>(m) / 100.0);
  std::size_t k = raw < 1.0 ? 1 : static_cast<std::size_t>(raw);
  return std::min(k, m);
}

Window extract_window(std::span<const AggregatedSample> samples, Step checkpoint_step, Step delta) {
  if (checkpoint_step < 1) throw ConfigError("checkpoint step must be >= 1");
  if (delta < 1) throw ConfigError("delta must be >= 1");
  Window w{checkpoint_step, delta, {}};
  w.samples = step_range(samples, w.first_step(), checkpoint_step);
  require_nonempty(w);
  return w;
}

std::vector<std::size_t> select_top_hard_indices(const Window& window, double p) {
  return top_by(window, p, [](const AggregatedSample& s) { return s.difficulty; });
}

std::vector<SampleKey> select_top_hard(const Window& window, double p) {
  return keys_of(window, select_top_hard_indices(window, p));
}

CheckpointScore ugcs_score(const Window& window, double p) {
  auto idx = select_top_hard_indices(window, p);
  CheckpointScore out{window.checkpoint_step, Strategy::ugcs, mean_reward_of(window, idx), keys_of(window, idx)};
  return out;
}

CheckpointScore train_reward_score(const Window& window) {
  require_nonempty(window);
  std::vector<std::size_t> all(window.samples.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return {window.checkpoint_step, Strategy::train_reward, mean_reward_of(window, all), keys_of(window, all)};
}

CheckpointScore top_reward_score(const Window& window, double p) {
  auto idx = top_by(window, p, [](const AggregatedSample& s) { return s.mean_reward; });
  return {window.checkpoint_step, Strategy::top_reward, mean_reward_of(window, idx), keys_of(window, idx)};
}

CheckpointScore val_reward_score(std::span<const AggregatedSample> validation, Step checkpoint_step) {
  auto range = step_range(validation, checkpoint_step, checkpoint_step + 1);
  if (range.empty()) {
    throw MissingValidationError("no validation records for checkpoint " +
                                 std::to_string(checkpoint_step));
  }
  std::vector<double> rewards;
  rewards.reserve(range.size());
  for (const auto& s : range) rewards.push_back(s.mean_reward);
  return {checkpoint_step, Strategy::val_reward, kernels::mean(rewards), {}};
}

CheckpointScore last_checkpoint_score(const RunManifest& manifest, Step checkpoint_step) {
  const double v = (!manifest.checkpoint_steps.empty() && checkpoint_step == manifest.last_checkpoint()) ? 1.0 : 0.0;
  return {checkpoint_step, Strategy::last_checkpoint, v, {}};
}

std::size_t validation_size(std::span<const AggregatedSample> validation, Step checkpoint_step) {
  return step_range(validation, checkpoint_step, checkpoint_step + 1).size();
}

CheckpointScore score_checkpoint(Strategy strategy, const ScoringInputs& in, Step checkpoint_step,
                                 const ScoringParams& params) {
  switch (strategy) {
    case Strategy::last_checkpoint:
      if (in.manifest == nullptr) throw ConfigError("last_checkpoint needs a manifest");
      return last_checkpoint_score(*in.manifest, checkpoint_step);
    case Strategy::val_reward:
      return val_reward_score(in.validation, checkpoint_step);
    default:
      break;
  }
  const Window w = extract_window(in.train, checkpoint_step, params.delta);
  switch (strategy) {
    case Strategy::ugcs: return ugcs_score(w, params.p);
    case Strategy::train_reward: return train_reward_score(w);
    case Strategy::top_reward: return top_reward_score(w, params.p);
    default: break;
  }
  throw ConfigError("unknown strategy");
}

}  // namespace ugcs
