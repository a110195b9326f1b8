#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace levelset {

/// Bad arguments from the caller (wrong dimension, p < 1, empty grid, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The input is well-formed but outside what a routine can handle
/// (non-radial pair for the radial oracle, unbounded support for Monte Carlo).
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A checked precondition failed, e.g. a grid box that does not contain the level set.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Function-spec syntax error. `position` is the 0-based character offset.
class ParseError : public UsageError {
 public:
  ParseError(std::size_t position, const std::string& expected, const std::string& found)
      : UsageError("parse error at position " + std::to_string(position) + ": expected " +
                   expected + ", found " + found),
        position_(position),
        expected_(expected) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t position_;
  std::string expected_;
};

}  // namespace levelset
