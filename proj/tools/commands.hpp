#pragma once

#include <string>
#include <vector>

#include "run_config.hpp"

namespace varstokes::cli {

enum ExitCode : int { kPass = 0, kCheckFailed = 1, kConfigError = 2, kSolverFailure = 3 };

/// One measured quantity compared against a tolerance.
struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  std::string relation;  // "<=", ">=" or "=="
  bool pass = false;
};

Check check_le(std::string name, double value, double tol);
Check check_ge(std::string name, double value, double bound);
Check check_eq(std::string name, double value, double expected);

nlohmann::ordered_json checks_json(const std::vector<Check>& checks);
bool all_pass(const std::vector<Check>& checks);

/// Least-squares slope of log(err) against log(h) over the positive errors;
/// NaN with fewer than two.
double fitted_slope(const std::vector<double>& h, const std::vector<double>& err);

// Each command writes its files into config.out and returns an ExitCode.
// Library exceptions propagate; run() maps them to exit codes.
int cmd_verify(const RunConfig& config);
int cmd_dirichlet(const RunConfig& config);
int cmd_convergence(const RunConfig& config);
int cmd_infsup(const RunConfig& config);

/// Dispatches a subcommand, turning ConfigError/PreconditionError into 2 and
/// SolverError/AssemblyError into 3 with a message on stderr.
int run(const std::string& command, const RunConfig& config);

}  // namespace varstokes::cli
