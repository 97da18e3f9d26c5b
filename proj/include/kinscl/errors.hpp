#pragma once

#include <stdexcept>
#include <string>

namespace kinscl {

/// Invalid configuration or precondition; reported before any stepping.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A runtime invariant failed mid-run (range, finiteness, CFL on the actual state).
class InvariantViolation : public std::runtime_error {
 public:
  InvariantViolation(const std::string& what, int step)
      : std::runtime_error(what + " at step " + std::to_string(step)), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

/// Kinetic mass reached the xi-truncation boundary.
class TruncationExceeded : public InvariantViolation {
 public:
  TruncationExceeded(const std::string& what, int step) : InvariantViolation("truncation exceeded: " + what, step) {}
};

}  // namespace kinscl
