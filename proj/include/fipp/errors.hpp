#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fipp {

// Malformed input file. `line` is 1-based, 0 when not tied to a line.
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class PlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoPathError : public PlanError {
 public:
  NoPathError() : PlanError("no path to goal") {}
};

class OutOfBoundsError : public PlanError {
 public:
  using PlanError::PlanError;
};

}  // namespace fipp
