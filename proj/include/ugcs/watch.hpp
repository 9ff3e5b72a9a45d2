#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_set>
#include <vector>

#include "ugcs/log_io.hpp"
#include "ugcs/selection.hpp"

namespace ugcs {

/// Incremental reader over a growing log file, or a directory of *.jsonl
/// files taken in name order. Only newline-terminated lines are returned
/// until flush() releases a trailing partial line.
class LogTailer {
 public:
  struct Line {
    std::string text;
    std::string source;  // file name
    std::size_t line_no;
  };

  explicit LogTailer(std::filesystem::path path);

  // Appends every complete line written since the last call.
  std::size_t poll(std::vector<Line>& out);
  // Like poll(), then also hands out unterminated trailing lines.
  std::size_t flush(std::vector<Line>& out);

 private:
  struct FileState {
    std::filesystem::path path;
    std::uintmax_t offset = 0;
    std::string partial;
    std::size_t lines = 0;
  };

  void discover();
  std::size_t read_all(std::vector<Line>& out, bool final);

  std::filesystem::path root_;
  bool directory_ = false;
  std::vector<FileState> files_;
};

/// Watch mode: tails a log and runs it through a StreamSelector.
class WatchSession {
 public:
  WatchSession(std::filesystem::path path, const RunManifest& manifest, Strategy strategy,
               ScoringParams params, DifficultyMetric metric,
               std::vector<AggregatedSample> validation = {});

  // Ingests whatever complete lines are available.
  std::vector<BestChanged> poll();
  // End of stream: ingests the remainder and scores outstanding checkpoints.
  std::vector<BestChanged> finish();

  std::size_t records_seen() const noexcept { return records_; }
  const StreamSelector& selector() const noexcept { return selector_; }

 private:
  std::vector<BestChanged> ingest(const std::vector<LogTailer::Line>& lines);

  LogTailer tailer_;
  ParseOptions options_;
  StreamSelector selector_;
  std::size_t records_ = 0;
  // Steps never decrease, so duplicates can only collide within one step.
  Step current_step_ = 0;
  std::unordered_set<std::string> step_keys_;
};

}  // namespace ugcs
