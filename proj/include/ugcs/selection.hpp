#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ugcs/aggregate.hpp"
#include "ugcs/scoring.hpp"

namespace ugcs {

/// Scores of one strategy across checkpoints, and the checkpoint it picks.
struct RankingReport {
  Strategy strategy = Strategy::ugcs;
  ScoringParams params;
  std::vector<CheckpointScore> scores;  // ascending checkpoint_step
  Step winner = 0;
  double winner_value = 0.0;
  // True when another checkpoint matched the maximum exactly and the
  // earliest one was kept.
  bool tie_policy_applied = false;
  std::vector<std::string> warnings;
};

struct Winner {
  Step step = 0;
  double value = 0.0;
  bool tie = false;
};

// argmax over `scores`, earliest step on exact ties. `scores` must be
// non-empty and ordered by checkpoint_step.
Winner pick_winner(std::span<const CheckpointScore> scores);

// One score per manifest checkpoint; checkpoints with empty windows are
// skipped with a warning. Throws NoScorableCheckpointError if none remain.
RankingReport rank_checkpoints(const ScoringInputs& inputs, Strategy strategy,
                               const ScoringParams& params);

// Suggested p for weaker and stronger base models, echoed in sweep reports.
inline constexpr double kRecommendedPWeak = 3.0;
inline constexpr double kRecommendedPStrong = 10.0;
std::vector<double> default_p_grid();      // 1, 2, ..., 20
std::vector<Step> default_delta_grid();    // 10, 20, 50, 100

using CalibrationTable = std::map<Step, double>;

enum class SweepAxis { p, delta };

struct SweepEntry {
  double axis_value = 0.0;
  RankingReport ranking;
  std::optional<double> calibration_of_winner;
};

struct SweepReport {
  SweepAxis axis = SweepAxis::p;
  std::vector<SweepEntry> entries;  // ascending axis_value
  // p sweep: grid value whose winner scores best on calibration (ties to the
  // smaller value).
  std::optional<double> recommended;
  // delta sweep: every grid value picked the same checkpoint.
  bool winners_agree = false;
};

// UGCS ranking for each p at a fixed delta. Throws MissingCalibrationError if
// a scored checkpoint has no calibration entry, ConfigError on a bad grid.
SweepReport sweep_p(const ScoringInputs& inputs, std::span<const double> p_grid,
                    const CalibrationTable& calibration, Step delta);

SweepReport sweep_delta(const ScoringInputs& inputs, std::span<const Step> delta_grid,
                        Strategy strategy, const ScoringParams& params);

struct BestChanged {
  Step step = 0;
  double value = 0.0;
};

/// Online best-so-far selection over a log that arrives one step at a time.
///
/// Holds aggregated samples for the most recent `delta` steps. When the
/// stream reaches or passes a manifest checkpoint, that checkpoint's window
/// is scored and the running best is updated; BestChanged is reported only
/// on strict improvement, so the earliest of equal scores is kept, exactly as
/// in rank_checkpoints.
class StreamSelector {
 public:
  StreamSelector(RunManifest manifest, Strategy strategy, ScoringParams params,
                 DifficultyMetric metric, std::vector<AggregatedSample> validation = {});

  // Ingests all records of one step. Steps must be nondecreasing; a repeated
  // step appends to that step's answers. Throws OutOfOrderStepError.
  std::vector<BestChanged> update(Step step, std::span<const AnswerRecord> records);

  // Scores every pending checkpoint <= step; no records are consumed.
  std::vector<BestChanged> advance_to(Step step);

  // End of stream: scores pending checkpoints with whatever is buffered.
  std::vector<BestChanged> finish();

  // Samples with step in [latest - delta + 1, latest], in key order.
  std::vector<AggregatedSample> buffer() const;

  std::optional<CheckpointScore> best() const;
  const std::vector<CheckpointScore>& scores() const noexcept { return scores_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  std::optional<Step> latest_step() const noexcept { return latest_; }
  bool done() const noexcept { return next_checkpoint_ >= manifest_.checkpoint_steps.size(); }

 private:
  void seal_pending();
  void evict(Step latest);
  std::vector<BestChanged> score_through(Step step);

  RunManifest manifest_;
  Strategy strategy_;
  ScoringParams params_;
  std::vector<AggregatedSample> validation_;
  SampleAggregator pending_;  // answers of the latest step, not yet sealed
  std::vector<AggregatedSample> sealed_;
  std::optional<Step> latest_;
  std::size_t next_checkpoint_ = 0;
  std::vector<CheckpointScore> scores_;
  std::vector<std::string> warnings_;
  mutable std::mutex best_mutex_;
  std::optional<CheckpointScore> best_;
};

}  // namespace ugcs
