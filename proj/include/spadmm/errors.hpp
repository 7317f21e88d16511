#pragma once

#include <stdexcept>
#include <string>

namespace spadmm {

/// Invalid user input: malformed files, bad dimensions, out-of-range targets.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A CSV parse failure tied to a 1-based line and column.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : InputError(what), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A linear system that cannot be factorized (rank-deficient constraints).
class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spadmm
