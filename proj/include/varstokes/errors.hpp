#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace varstokes {

/// Invalid geometry, viscosity or run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called with data violating its documented precondition.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Viscosity bound c_mu^{-1} <= mu <= c_mu violated during assembly.
class AssemblyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Linear or eigen solver breakdown. Carries the residual history when an
/// iterative method gave up.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what, std::vector<double> history = {})
      : std::runtime_error(what), residual_history(std::move(history)) {}

  std::vector<double> residual_history;
};

}  // namespace varstokes
