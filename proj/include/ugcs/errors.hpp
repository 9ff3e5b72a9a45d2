#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ugcs {

// Error classes map one-to-one onto CLI exit codes.
enum class ErrorCategory {
  usage = 1,          // bad flags or configuration
  validation = 2,     // schema / invariant violations in input files
  unscorable = 3,     // empty windows, nothing to rank
  missing_table = 4,  // precomputed scores, validation or calibration data absent
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }
  int exit_code() const noexcept { return static_cast<int>(category_); }

 private:
  ErrorCategory category_;
};

// Input-file errors carry the 1-based line number when known (0 otherwise).
class InputError : public Error {
 public:
  InputError(const std::string& what, std::size_t line)
      : Error(ErrorCategory::validation,
              line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct SchemaError : InputError {
  using InputError::InputError;
};
struct InvariantError : InputError {
  using InputError::InputError;
};
struct DuplicateKeyError : InputError {
  using InputError::InputError;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::usage, what) {}
};
struct TooFewGenerationsError : Error {
  explicit TooFewGenerationsError(const std::string& what) : Error(ErrorCategory::validation, what) {}
};
struct OutOfOrderStepError : Error {
  explicit OutOfOrderStepError(const std::string& what) : Error(ErrorCategory::validation, what) {}
};

struct EmptyInputError : Error {
  explicit EmptyInputError(const std::string& what) : Error(ErrorCategory::unscorable, what) {}
};
struct EmptyWindowError : Error {
  explicit EmptyWindowError(const std::string& what) : Error(ErrorCategory::unscorable, what) {}
};
struct NoScorableCheckpointError : Error {
  explicit NoScorableCheckpointError(const std::string& what)
      : Error(ErrorCategory::unscorable, what) {}
};

struct MissingPrecomputedScoreError : Error {
  explicit MissingPrecomputedScoreError(const std::string& what)
      : Error(ErrorCategory::missing_table, what) {}
};
struct MissingValidationError : Error {
  explicit MissingValidationError(const std::string& what)
      : Error(ErrorCategory::missing_table, what) {}
};
struct MissingCalibrationError : Error {
  explicit MissingCalibrationError(const std::string& what)
      : Error(ErrorCategory::missing_table, what) {}
};

}  // namespace ugcs
