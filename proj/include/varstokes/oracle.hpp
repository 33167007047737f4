#pragma once

#include <string>
#include <vector>

#include "varstokes/forms.hpp"
#include "varstokes/viscosity.hpp"

namespace varstokes {

/// Polynomial in one variable, coefficients in increasing degree.
class Poly1D {
 public:
  Poly1D() = default;
  explicit Poly1D(std::vector<double> coeffs) : c_(std::move(coeffs)) {}

  double operator()(double t) const;
  Poly1D derivative() const;
  Poly1D operator*(const Poly1D& o) const;
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<double>& coeffs() const { return c_; }

 private:
  std::vector<double> c_;
};

/// (4 (t-l)(r-t) / (r-l)^2)^k on [l,r], zero outside; C^{k-1} across l and r.
class Bump1D {
 public:
  Bump1D(double l, double r, int k);
  /// d-th derivative at t.
  double operator()(double t, int d = 0) const;

 private:
  double l_, r_;
  std::vector<Poly1D> derivs_;
};

/// Kelvin (Stokeslet) tensor G_ij = (delta_ij/r + r_i r_j/r^3) / (8 pi mu), r = x - y.
Matrix3 stokeslet(const Vec3& x, const Vec3& y, double mu);
/// P_j = r_j / (4 pi r^3).
Vec3 pressurelet(const Vec3& x, const Vec3& y);
/// d/dx_k of (G F)_i, returned as the matrix [i][k].
Matrix3 stokeslet_gradient(const Vec3& x, const Vec3& y, double mu, const Vec3& force);

/// int_Gamma G(x,y) density(y) dsigma_y by the degree-5 triangle rule on each
/// Gamma face split 4^levels times. Throws PreconditionError when x is closer
/// than min_distance to Gamma.
Vec3 classical_single_layer(const Mesh& mesh, const VectorFunction& density, const Vec3& x, double mu,
                            int levels, double min_distance);

/// Distance from x to the surface of the cube (-a,a)^3.
double distance_to_gamma(const Vec3& x, double a);

struct ManufacturedSolution {
  std::string id;
  VectorFunction u;
  GradientFunction grad_u;
  ScalarFunction p;
  /// Body force with div(2 mu E u) - grad p = f.
  VectorFunction f;
  /// Whether f vanishes identically.
  bool force_free = true;
  /// u restricted to Gamma.
  VectorFunction phi;
  /// Whether the flux of phi through Gamma vanishes analytically.
  bool flux_free = true;
  /// Whether u vanishes near the outer boundary, so that the truncated
  /// problem has u itself as exact solution.
  bool vanishes_on_outer = true;
};

/// Registry: "zero", "curl-bump", "stokeslet-in" (mu = 1 only), "radial"
/// (source flow, nonzero flux through Gamma; constant mu only). Throws
/// ConfigError for unknown ids or unsupported viscosities.
ManufacturedSolution manufactured(const std::string& id, const ViscosityField& mu, const GeometrySpec& geometry);

}  // namespace varstokes
