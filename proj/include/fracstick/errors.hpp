#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fracstick {

/// An argument lies outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// The grid or quadrature is too coarse for the requested evaluation.
struct ResolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A documented precondition between arguments does not hold.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent experiment configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Iteration whose residual kept growing; carries the residual history.
class DivergedError : public std::runtime_error {
 public:
  DivergedError(const std::string& what, std::vector<double> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}

  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  std::vector<double> trace_;
};

}  // namespace fracstick
