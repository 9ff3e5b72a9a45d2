#include "ugcs/selection.hpp"

#include <algorithm>
#include <string>

#include "ugcs/errors.hpp"

namespace ugcs {
namespace {

template <typename T>
void require_ascending_grid(std::span<const T> grid, const char* name) {
  if (grid.empty()) throw ConfigError(std::string(name) + " grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i - 1] < grid[i])) throw ConfigError(std::string(name) + " grid must be strictly ascending");
  }
}

}  // namespace

Winner pick_winner(std::span<const CheckpointScore> scores) {
  if (scores.empty()) throw NoScorableCheckpointError("no checkpoint scores to pick from");
  Winner w{scores.front().checkpoint_step, scores.front().value, false};
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i].value > w.value) {
      w = {scores[i].checkpoint_step, scores[i].value, false};
    } else if (scores[i].value == w.value) {
      w.tie = true;
    }
  }
  return w;
}

RankingReport rank_checkpoints(const ScoringInputs& inputs, Strategy strategy,
                               const ScoringParams& params) {
  validate(params);
  if (inputs.manifest == nullptr) throw ConfigError("ranking needs a manifest");
  RankingReport report;
  report.strategy = strategy;
  report.params = params;
  for (Step c : inputs.manifest->checkpoint_steps) {
    try {
      report.scores.push_back(score_checkpoint(strategy, inputs, c, params));
    } catch (const EmptyWindowError& e) {
      report.warnings.push_back(std::string("skipped: ") + e.what());
    }
  }
  if (report.scores.empty()) {
    throw NoScorableCheckpointError("no scorable checkpoint for strategy " +
                                    std::string(strategy_id(strategy)));
  }
  const Winner w = pick_winner(report.scores);
  report.winner = w.step;
  report.winner_value = w.value;
  report.tie_policy_applied = w.tie;
  return report;
}

std::vector<double> default_p_grid() {
  std::vector<double> g;
  for (int p = 1; p <= 20; ++p) g.push_back(p);
  return g;
}

std::vector<Step> default_delta_grid() { return {10, 20, 50, 100}; }

SweepReport sweep_p(const ScoringInputs& inputs, std::span<const double> p_grid,
                    const CalibrationTable& calibration, Step delta) {
  require_ascending_grid(p_grid, "p");
  SweepReport report;
  report.axis = SweepAxis::p;
  for (double p : p_grid) {
    SweepEntry entry;
    entry.axis_value = p;
    entry.ranking = rank_checkpoints(inputs, Strategy::ugcs, {p, delta});
    for (const auto& s : entry.ranking.scores) {
      if (!calibration.contains(s.checkpoint_step)) {
        throw MissingCalibrationError("no calibration score for checkpoint " +
                                      std::to_string(s.checkpoint_step));
      }
    }
    entry.calibration_of_winner = calibration.at(entry.ranking.winner);
    report.entries.push_back(std::move(entry));
  }
  const SweepEntry* best = &report.entries.front();
  for (const auto& e : report.entries) {
    if (*e.calibration_of_winner > *best->calibration_of_winner) best = &e;
  }
  report.recommended = best->axis_value;
  report.winners_agree = std::all_of(report.entries.begin(), report.entries.end(), [&](const SweepEntry& e) {
    return e.ranking.winner == report.entries.front().ranking.winner;
  });
  return report;
}

SweepReport sweep_delta(const ScoringInputs& inputs, std::span<const Step> delta_grid,
                        Strategy strategy, const ScoringParams& params) {
  require_ascending_grid(delta_grid, "delta");
  SweepReport report;
  report.axis = SweepAxis::delta;
  for (Step d : delta_grid) {
    SweepEntry entry;
    entry.axis_value = static_cast<double>(d);
    entry.ranking = rank_checkpoints(inputs, strategy, {params.p, d});
    report.entries.push_back(std::move(entry));
  }
  report.winners_agree = std::all_of(report.entries.begin(), report.entries.end(), [&](const SweepEntry& e) {
    return e.ranking.winner == report.entries.front().ranking.winner;
  });
  return report;
}

StreamSelector::StreamSelector(RunManifest manifest, Strategy strategy, ScoringParams params,
                               DifficultyMetric metric, std::vector<AggregatedSample> validation)
    : manifest_(std::move(manifest)),
      strategy_(strategy),
      params_(params),
      validation_(std::move(validation)),
      pending_(std::move(metric), manifest_.n_per_question) {
  validate(params_);
  manifest_.validate();
  std::sort(validation_.begin(), validation_.end(),
            [](const AggregatedSample& a, const AggregatedSample& b) { return a.key < b.key; });
}

void StreamSelector::seal_pending() {
  if (pending_.empty()) return;
  AggregationResult r = pending_.finalize();
  for (auto& w : r.warnings) warnings_.push_back(std::move(w));
  sealed_.insert(sealed_.end(), std::make_move_iterator(r.samples.begin()),
                 std::make_move_iterator(r.samples.end()));
  pending_.clear();
}

void StreamSelector::evict(Step latest) {
  const Step keep_from = latest - params_.delta + 1;
  auto first_kept = std::find_if(sealed_.begin(), sealed_.end(),
                                 [&](const AggregatedSample& s) { return s.key.step >= keep_from; });
  sealed_.erase(sealed_.begin(), first_kept);
}

std::vector<BestChanged> StreamSelector::score_through(Step step) {
  std::vector<BestChanged> events;
  const ScoringInputs inputs{sealed_, validation_, &manifest_};
  while (next_checkpoint_ < manifest_.checkpoint_steps.size() &&
         manifest_.checkpoint_steps[next_checkpoint_] <= step) {
    const Step c = manifest_.checkpoint_steps[next_checkpoint_++];
    CheckpointScore score;
    try {
      score = score_checkpoint(strategy_, inputs, c, params_);
    } catch (const EmptyWindowError& e) {
      warnings_.push_back(std::string("skipped: ") + e.what());
      continue;
    }
    scores_.push_back(score);
    std::lock_guard lock(best_mutex_);
    if (!best_ || score.value > best_->value) {
      best_ = score;
      events.push_back({score.checkpoint_step, score.value});
    }
  }
  return events;
}

std::vector<BestChanged> StreamSelector::advance_to(Step step) {
  if (latest_ && step < *latest_) {
    throw OutOfOrderStepError("step " + std::to_string(step) + " arrived after step " +
                              std::to_string(*latest_));
  }
  if (!latest_ || step > *latest_) {
    // Everything logged so far precedes `step`, so the pending step is complete.
    seal_pending();
  }
  auto events = score_through(step);
  if (!latest_ || step > *latest_) {
    latest_ = step;
    evict(step);
  }
  return events;
}

std::vector<BestChanged> StreamSelector::update(Step step, std::span<const AnswerRecord> records) {
  for (const auto& r : records) {
    if (r.step != step) {
      throw InvariantError("record for step " + std::to_string(r.step) +
                               " passed in the batch for step " + std::to_string(step),
                           0);
    }
  }
  auto events = advance_to(step);
  for (const auto& r : records) pending_.add(r);
  return events;
}

std::vector<BestChanged> StreamSelector::finish() {
  seal_pending();
  if (manifest_.checkpoint_steps.empty()) return {};
  return score_through(manifest_.checkpoint_steps.back());
}

std::vector<AggregatedSample> StreamSelector::buffer() const {
  std::vector<AggregatedSample> out = sealed_;
  if (!pending_.empty()) {
    AggregationResult r = pending_.finalize();
    out.insert(out.end(), r.samples.begin(), r.samples.end());
  }
  return out;
}

std::optional<CheckpointScore> StreamSelector::best() const {
  std::lock_guard lock(best_mutex_);
  return best_;
}

}  // namespace ugcs
