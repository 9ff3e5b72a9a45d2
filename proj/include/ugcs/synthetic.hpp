#pragma once

// Seeded generator of synthetic RL-finetuning logs with known per-checkpoint
// generalization.
//
// Latent state per step t:
//   g(t)  general ability, a random walk with drift
//   m(t)  shortcut reliance, a random walk that starts at shortcut_onset
// The ability that generalizes is G(t) = g(t) - shortcut_cost * m(t). On a
// training item s with latent difficulty d_s the policy acts with
//   a(t, s) = G(t) + w_s * shortcut_gain * m(t) + memo_s(t)
// where w_s ~ 1 for items outside the hardest shortcut_free_percent of the
// pool (the shortcut only works on those) and memo_s grows with the number
// of earlier visits to s, for the susceptible share of items only. Per answer:
//   reward ~ Bernoulli(sigmoid(alpha * (a - d_s)))
//   anll    = softplus(d_s - a) + |N(0, anll_noise_sd)|
// The hardest label_noise_percent of the pool never earns reward and sits
// label_noise_difficulty_shift further up the difficulty scale.
// true_generalization(c) = mean over a hard-shifted eval pool of
// sigmoid(alpha * (G(c) - d)).

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ugcs/difficulty.hpp"
#include "ugcs/records.hpp"

namespace ugcs {

/// xoshiro256** seeded through splitmix64. Doubles use the top 53 bits and
/// normals use Box-Muller, so streams are identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next_u64();
  double uniform();  // [0, 1)
  double normal();
  bool bernoulli(double p) { return uniform() < p; }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t s_[4];
};

struct SyntheticRunConfig {
  std::uint64_t seed = 0;
  Step total_steps = 1000;
  int batch_size = 8;
  int n_per_question = 8;
  Step save_every = 100;
  int max_response_len = 1200;

  double initial_ability = 0.0;
  double ability_drift = 0.002;
  double ability_noise_sd = 0.03;

  double difficulty_mean = 0.0;
  double difficulty_sd = 1.0;
  double eval_difficulty_shift = 1.0;
  double reward_sharpness = 1.5;  // alpha
  double anll_noise_sd = 0.3;

  int pool_size = 1000;
  int eval_pool_size = 500;
  int val_pool_size = 100;

  Step shortcut_onset = 300;
  double shortcut_drift = 0.006;
  double shortcut_noise_sd = 0.03;
  double shortcut_gain = 1.5;
  double shortcut_cost = 0.5;
  double shortcut_free_percent = 20.0;
  double shortcut_width_percent = 2.0;

  // Only this share of training items can be learned by rote.
  double memo_susceptible_fraction = 0.5;
  double memo_strength = 3.0;
  double memo_scale = 3.0;

  double label_noise_percent = 0.0;
  // Extra latent difficulty of the label-noise items.
  double label_noise_difficulty_shift = 2.0;

  // Ability and shortcut hold still on each interval [kS, (k+1)S) and each
  // interval draws its level independently around the drift line. The
  // checkpoint at (k+1)S takes the level of the interval it closes.
  bool piecewise_stationary = false;

  // Mean answer length and how strongly it grows with item hardness.
  double length_mean = 300.0;
  double length_hardness_slope = 0.5;
  double length_noise_sd = 0.3;

  // Fraction of answers logged with token_logprobs instead of sum_logprob.
  double token_evidence_fraction = 0.0;

  // Generations per item for the base-model PRE_* tables.
  int pre_generations = 8;

  // Throws ConfigError.
  void validate() const;

  // The p at the centre of the clean band between the label-noise stratum
  // and the shortcut-prone items, when a label-noise stratum exists.
  std::optional<double> planted_p() const;
};

SyntheticRunConfig synthetic_config_from_json(const nlohmann::json& j);
nlohmann::json synthetic_config_to_json(const SyntheticRunConfig& config);

// Named presets: "default", "stationary", "planted_p".
SyntheticRunConfig synthetic_preset(const std::string& name);

struct SyntheticRun {
  SyntheticRunConfig config;
  RunManifest manifest;
  std::vector<AnswerRecord> train;
  std::vector<AnswerRecord> validation;
  std::map<Step, double> truth;
  std::map<MetricKind, ScoreTable> pre_tables;  // pre_anll, pre_nll, pre_consistency
};

SyntheticRun generate_run(const SyntheticRunConfig& config);

// max truth minus truth(winner). Throws ConfigError if winner is absent.
double selection_regret(const std::map<Step, double>& truth, Step winner);

// Writes train.jsonl, val.jsonl, manifest.json, truth.csv, config.json and
// pre_<metric>.json into `dir`, creating it if needed.
void write_run_directory(const SyntheticRun& run, const std::filesystem::path& dir);

// CSV `checkpoint_step,true_generalization` (any second column name).
std::map<Step, double> load_step_table_csv(const std::filesystem::path& path);
void save_step_table_csv(const std::filesystem::path& path, const std::map<Step, double>& table,
                         const std::string& value_column);

}  // namespace ugcs
