#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "varstokes/mesh.hpp"
#include "varstokes/viscosity.hpp"

namespace varstokes::cli {

/// Everything a subcommand needs. Defaults:
///   a=1 R=2 n=4 mu=two-phase:0.5,2 data=curl-bump method=both seed=1
///   solver_tol=1e-10 samples=5 levels=4,8,16 rstudy_n=8 element=p2b out=.
/// tol is unset by default, so every check keeps its own tolerance; setting it
/// replaces all residual tolerances at once.
struct RunConfig {
  GeometrySpec geometry{1.0, 2.0, 4};
  std::string mu = "two-phase:0.5,2";
  std::string data = "curl-bump";
  std::string method = "both";
  std::optional<double> tol;
  double solver_tol = 1e-10;
  std::uint64_t seed = 1;
  int samples = 5;
  std::vector<int> levels{4, 8, 16};
  bool levels_set = false;
  int rstudy_n = 8;
  std::string study = "both";
  std::string element = "p2b";
  std::string out = ".";
  bool write_mesh = false;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  ViscosityField viscosity() const;
  nlohmann::ordered_json to_json() const;
  /// Residual tolerance: tol when set, else the check's own default.
  double tolerance(double fallback) const { return tol ? *tol : fallback; }
};

/// key=value lines; '#' starts a comment, blank lines are skipped.
std::map<std::string, std::string> read_key_values(const std::string& path);

/// Applies one key. Unknown keys and malformed values throw ConfigError.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

std::vector<int> parse_int_list(const std::string& key, const std::string& value);

}  // namespace varstokes::cli
