#include "ugcs/watch.hpp"

#include <algorithm>
#include <fstream>

#include "ugcs/errors.hpp"

namespace ugcs {

LogTailer::LogTailer(std::filesystem::path path) : root_(std::move(path)) {
  if (!std::filesystem::exists(root_)) throw ConfigError("watch path does not exist: " + root_.string());
  directory_ = std::filesystem::is_directory(root_);
  if (!directory_) files_.push_back(FileState{root_, 0, {}, 0});
}

void LogTailer::discover() {
  if (!directory_) return;
  std::vector<std::filesystem::path> found;
  for (const auto& entry : std::filesystem::directory_iterator(root_)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") found.push_back(entry.path());
  }
  std::sort(found.begin(), found.end());
  for (const auto& p : found) {
    const bool known = std::any_of(files_.begin(), files_.end(), [&](const FileState& f) { return f.path == p; });
    if (!known) files_.push_back(FileState{p, 0, {}, 0});
  }
}

std::size_t LogTailer::read_all(std::vector<Line>& out, bool final) {
  discover();
  std::size_t added = 0;
  for (auto& f : files_) {
    std::error_code ec;
    const auto size = std::filesystem::file_size(f.path, ec);
    if (!ec && size > f.offset) {
      std::ifstream in(f.path, std::ios::binary);
      if (!in) throw ConfigError("cannot open " + f.path.string());
      in.seekg(static_cast<std::streamoff>(f.offset));
      std::string chunk(static_cast<std::size_t>(size - f.offset), '\0');
      in.read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
      chunk.resize(static_cast<std::size_t>(in.gcount()));
      f.offset += chunk.size();
      f.partial += chunk;
    }
    std::size_t start = 0;
    for (std::size_t nl; (nl = f.partial.find('\n', start)) != std::string::npos; start = nl + 1) {
      out.push_back({f.partial.substr(start, nl - start), f.path.filename().string(), ++f.lines});
      ++added;
    }
    f.partial.erase(0, start);
    if (final && !f.partial.empty()) {
      out.push_back({std::move(f.partial), f.path.filename().string(), ++f.lines});
      f.partial.clear();
      ++added;
    }
  }
  return added;
}

std::size_t LogTailer::poll(std::vector<Line>& out) { return read_all(out, false); }

std::size_t LogTailer::flush(std::vector<Line>& out) { return read_all(out, true); }

WatchSession::WatchSession(std::filesystem::path path, const RunManifest& manifest, Strategy strategy,
                           ScoringParams params, DifficultyMetric metric,
                           std::vector<AggregatedSample> validation)
    : tailer_(std::move(path)),
      options_(ParseOptions::for_manifest(manifest)),
      selector_(manifest, strategy, params, std::move(metric), std::move(validation)) {}

std::vector<BestChanged> WatchSession::ingest(const std::vector<LogTailer::Line>& lines) {
  std::vector<BestChanged> events;
  for (const auto& line : lines) {
    std::string_view text = line.text;
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    if (text.find_first_not_of(" \t") == std::string_view::npos) continue;
    AnswerRecord r;
    try {
      r = parse_record(text, line.line_no, options_);
    } catch (const InputError& e) {
      throw SchemaError(line.source + ": " + e.what(), 0);
    }
    if (r.step != current_step_) {
      current_step_ = r.step;
      step_keys_.clear();
    }
    if (!step_keys_.insert(r.sample_id + '\x1f' + std::to_string(r.answer_index)).second) {
      throw DuplicateKeyError(line.source + ": line " + std::to_string(line.line_no) + ": duplicate (step " +
                                  std::to_string(r.step) + ", sample_id '" + r.sample_id + "', answer_index " +
                                  std::to_string(r.answer_index) + ")",
                              0);
    }
    auto e = selector_.update(r.step, std::span<const AnswerRecord>(&r, 1));
    events.insert(events.end(), e.begin(), e.end());
    ++records_;
  }
  return events;
}

std::vector<BestChanged> WatchSession::poll() {
  std::vector<LogTailer::Line> lines;
  tailer_.poll(lines);
  return ingest(lines);
}

std::vector<BestChanged> WatchSession::finish() {
  std::vector<LogTailer::Line> lines;
  tailer_.flush(lines);
  auto events = ingest(lines);
  auto rest = selector_.finish();
  events.insert(events.end(), rest.begin(), rest.end());
  return events;
}

}  // namespace ugcs
