#include "ugcs/records.hpp"

#include <string>

#include "ugcs/errors.hpp"

namespace ugcs {

std::vector<Step> RunManifest::default_checkpoints(Step total_steps, Step save_every) {
  std::vector<Step> out;
  if (save_every <= 0) return out;
  for (Step s = save_every; s <= total_steps; s += save_every) out.push_back(s);
  return out;
}

void RunManifest::validate() const {
  if (n_per_question < 1) throw ConfigError("manifest: n_per_question must be >= 1");
  if (batch_size < 1) throw ConfigError("manifest: batch_size must be >= 1");
  if (total_steps < 1) throw ConfigError("manifest: total_steps must be >= 1");
  if (save_every < 1) throw ConfigError("manifest: save_every must be >= 1");
  if (max_response_len < 1) throw ConfigError("manifest: max_response_len must be >= 1");
  if (checkpoint_steps.empty()) throw ConfigError("manifest: checkpoint_steps is empty");
  if (logprob_phase && *logprob_phase != "pre_update" && *logprob_phase != "post_update") {
    throw ConfigError("manifest: logprob_phase must be pre_update or post_update");
  }
  for (std::size_t i = 0; i < checkpoint_steps.size(); ++i) {
    const Step c = checkpoint_steps[i];
    if (c < 1 || c > total_steps) {
      throw ConfigError("manifest: checkpoint step " + std::to_string(c) +
                        " outside [1, total_steps]");
    }
    if (i > 0 && c <= checkpoint_steps[i - 1]) {
      throw ConfigError("manifest: checkpoint_steps must be strictly ascending");
    }
  }
}

RunManifest default_manifest() {
  RunManifest m;
  m.checkpoint_steps = RunManifest::default_checkpoints(m.total_steps, m.save_every);
  return m;
}

}  // namespace ugcs
