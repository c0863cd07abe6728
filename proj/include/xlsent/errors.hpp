#pragma once

#include <stdexcept>
#include <string>

namespace xlsent {

// Shape or length disagreement between operands.
class SizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite values, zero-norm vectors and similar undefined math.
class NumericDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Rank-deficient or underdetermined linear systems.
class DegenerateSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input files. The message carries the offending line number.
class FormatError : public std::runtime_error {
 public:
  FormatError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_ = 0;
};

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace xlsent
