#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace accrete {

/// Argument outside the mathematical domain of an operation (x outside the
/// beam, non-positive height, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A documented precondition on the relation between inputs does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Zero-height cross-section: the 2x2 balance system is singular.
class DegenerateSectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The mass target cannot be met with the lower bound in force.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The incremental solver ran out of iterations. Carries the best iterate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> best, double residual)
      : std::runtime_error(what), best_iterate(std::move(best)), best_residual(residual) {}

  std::vector<double> best_iterate;
  double best_residual;
};

/// Malformed input to the sample-based helpers (unsorted abscissae, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0, int column = 0)
      : std::runtime_error(what), line(line), column(column) {}

  int line;
  int column;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace accrete
