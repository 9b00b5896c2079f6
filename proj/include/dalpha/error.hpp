#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dalpha {

/// Precondition violated by the caller (bad argument, wrong shape, missing labels).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file. Carries the 1-based line number of the offending row.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A quantity is not representable as a finite double.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// Every point is already a center; nothing left to sample.
class ExhaustedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal bookkeeping reached a state that the update rules forbid.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A lemma check failed during an experiment run.
class LemmaViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dalpha
