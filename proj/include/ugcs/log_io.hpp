#pragma once

// Newline-delimited JSON training/validation logs and the run manifest.
//
// One AnswerRecord object per line:
//   {"step":1,"sample_id":"q7","answer_index":0,"reward":1.0,"num_tokens":2,
//    "token_logprobs":[-1.0,-3.0]}
// with exactly one of `token_logprobs` (num_tokens values) or `sum_logprob`.
// Unknown scalar or nested fields are ignored. Blank lines are skipped.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ugcs/records.hpp"

namespace ugcs {

struct ParseOptions {
  // Positive log-probs up to this value are rounding artifacts and clamp to 0.
  double logprob_tolerance = 1e-6;
  // answer_index must be < n_per_question when > 0.
  int n_per_question = 0;
  bool check_duplicates = true;

  static ParseOptions for_manifest(const RunManifest& manifest);
};

// Parses and validates a single line. Throws SchemaError / InvariantError,
// prefixed with `line_no` when it is non-zero.
AnswerRecord parse_record(std::string_view line, std::size_t line_no = 0,
                          const ParseOptions& options = {});

/// Streaming reader over a log. Records come back in file order; the first
/// malformed line aborts with an InputError that carries its line number.
class LogReader {
 public:
  explicit LogReader(std::istream& in, ParseOptions options = {});
  ~LogReader();
  LogReader(const LogReader&) = delete;
  LogReader& operator=(const LogReader&) = delete;

  // False at end of stream.
  bool next(AnswerRecord& out);

  // Line number of the most recently consumed line.
  std::size_t line_number() const noexcept { return line_no_; }

 private:
  struct DuplicateIndex;

  std::istream& in_;
  ParseOptions options_;
  std::string line_;
  std::size_t line_no_ = 0;
  std::unique_ptr<DuplicateIndex> seen_;
};

std::vector<AnswerRecord> parse_log_stream(std::istream& in, const RunManifest& manifest);
std::vector<AnswerRecord> parse_log_stream(std::istream& in, const ParseOptions& options);

// Reads a log file; throws ConfigError if it cannot be opened.
std::vector<AnswerRecord> read_log_file(const std::filesystem::path& path,
                                        const ParseOptions& options);

// Single line, no trailing newline, shortest round-trip float formatting.
std::string serialize_record(const AnswerRecord& record);
void write_log(std::ostream& out, std::span<const AnswerRecord> records);

RunManifest manifest_from_json(const nlohmann::json& j);
nlohmann::json manifest_to_json(const RunManifest& manifest);
RunManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const RunManifest& manifest);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace ugcs
