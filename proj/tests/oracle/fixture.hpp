#pragma once

// Randomized training/validation logs for oracle tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ugcs/records.hpp"

namespace fixture {

struct Fixture {
  ugcs::RunManifest manifest;
  std::vector<ugcs::AnswerRecord> train;       // shuffled
  std::vector<ugcs::AnswerRecord> validation;  // answers logged at checkpoint steps
};

struct FixtureOptions {
  std::int64_t min_steps = 100;
  std::int64_t max_steps = 1000;
  int batch = 8;
  int answers = 8;
  int pool = 300;
  int val_pool = 24;
  // Coarse log-probs make exact difficulty ties common.
  bool quantized = false;
};

inline ugcs::AnswerRecord make_answer(std::mt19937_64& gen, ugcs::Step step, const std::string& id,
                                      int index, double p_correct, double hardness, bool quantized) {
  std::uniform_int_distribution<int> len(1, 40);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ugcs::AnswerRecord r;
  r.step = step;
  r.sample_id = id;
  r.answer_index = index;
  r.reward = u(gen) < p_correct ? 1.0 : 0.0;
  r.num_tokens = quantized ? 4 : len(gen);
  if (quantized || u(gen) < 0.5) {
    ugcs::TokenLogprobs t;
    for (std::int64_t i = 0; i < r.num_tokens; ++i) {
      double v = quantized ? -0.5 * std::floor(u(gen) * 4.0 * hardness) : -u(gen) * 2.0 * hardness;
      t.values.push_back(v);
    }
    r.evidence = t;
  } else {
    r.evidence = ugcs::SumLogprob{-u(gen) * 2.0 * hardness * static_cast<double>(r.num_tokens)};
  }
  return r;
}

inline Fixture make_fixture(std::uint64_t seed, const FixtureOptions& opt = {}) {
  std::mt19937_64 gen(seed * 7919 + 17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::int64_t> steps_dist(opt.min_steps, opt.max_steps);
  Fixture f;
  const std::int64_t steps = steps_dist(gen);
  const std::int64_t save_every = std::max<std::int64_t>(1, steps / 10);
  f.manifest.n_per_question = opt.answers;
  f.manifest.batch_size = opt.batch;
  f.manifest.total_steps = steps;
  f.manifest.save_every = save_every;
  f.manifest.checkpoint_steps = ugcs::RunManifest::default_checkpoints(steps, save_every);

  std::vector<double> hardness(opt.pool);
  for (auto& h : hardness) h = 0.2 + 1.8 * u(gen);
  std::uniform_int_distribution<int> pick(0, opt.pool - 1);
  for (std::int64_t s = 1; s <= steps; ++s) {
    std::vector<int> batch;
    while (static_cast<int>(batch.size()) < opt.batch) {
      int q = pick(gen);
      if (std::find(batch.begin(), batch.end(), q) == batch.end()) batch.push_back(q);
    }
    const double progress = static_cast<double>(s) / static_cast<double>(steps);
    for (int q : batch) {
      const double pc = std::clamp(1.1 - hardness[q] * (0.9 - 0.3 * progress), 0.0, 1.0);
      for (int a = 0; a < opt.answers; ++a) {
        f.train.push_back(make_answer(gen, s, "q" + std::to_string(q), a, pc, hardness[q], opt.quantized));
      }
    }
  }
  for (ugcs::Step cp : f.manifest.checkpoint_steps) {
    for (int v = 0; v < opt.val_pool; ++v) {
      for (int a = 0; a < opt.answers; ++a) {
        f.validation.push_back(make_answer(gen, cp, "v" + std::to_string(v), a, u(gen), 1.0, opt.quantized));
      }
    }
  }
  std::shuffle(f.train.begin(), f.train.end(), gen);
  std::shuffle(f.validation.begin(), f.validation.end(), gen);
  return f;
}

}  // namespace fixture
