#pragma once

#include <optional>
#include <string>
#include <vector>

#include "varstokes/mesh.hpp"

namespace varstokes {

/// Cellwise-constant viscosity from the registry:
///   "const:c"                 mu = c everywhere
///   "two-phase:cp,cm"         mu = cp on Omega_+, cm on Omega_-
///   "checkerboard:c1,c2,p"    c1/c2 alternating on cubes of side p
/// Values are evaluated once per cell (region tag or centroid), so assembly
/// with them is quadrature exact.
class ViscosityField {
 public:
  enum class Kind { Constant, TwoPhase, Checkerboard };

  /// Throws ConfigError naming the bad field. An explicit bound, when given,
  /// must satisfy bound >= max(sup mu, sup 1/mu).
  static ViscosityField parse(const std::string& spec, std::optional<double> bound = std::nullopt);
  static ViscosityField constant(double c);

  Kind kind() const { return kind_; }
  const std::string& spec() const { return spec_; }
  const std::vector<double>& params() const { return params_; }
  /// c_mu.
  double bound() const { return bound_; }

  double value(const Vec3& x, Region region) const;
  double cell_value(const Mesh& mesh, int cell) const;
  /// One value per cell; throws AssemblyError if a value leaves [1/c_mu, c_mu].
  std::vector<double> cell_values(const Mesh& mesh) const;
  /// True when mu takes a single value.
  bool is_constant() const;

 private:
  Kind kind_ = Kind::Constant;
  std::string spec_;
  std::vector<double> params_;
  double bound_ = 1.0;
};

}  // namespace varstokes
