#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rffol {

// Exit codes: 1 usage, 2 data, 3 numerical divergence.

/// Invalid arguments or configuration.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent input data. Carries a 1-based line number when
/// the failure came from a text source (0 otherwise).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Training produced a non-finite parameter.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& what, std::size_t step = 0)
      : std::runtime_error(what), step_(step) {}

  /// 0-based index of the stream instance whose update diverged.
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace rffol
