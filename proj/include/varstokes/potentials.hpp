#pragma once

#include <memory>

#include <Eigen/Core>

#include "varstokes/forms.hpp"
#include "varstokes/stokes.hpp"

namespace varstokes {

struct PotentialPair {
  enum class Kind { Newtonian, SingleLayer };
  Eigen::VectorXd u;  // full velocity vector
  Eigen::VectorXd p;  // pressure, shell normalized
  Kind kind = Kind::Newtonian;
  double momentum_residual = 0.0;
  double constraint_residual = 0.0;
};

struct JumpReport {
  double trace_jump = 0.0;        // ||gamma_+ u - gamma_- u||
  double conormal_residual = 0.0;  // dual norm of t+ - t- - phi
};

struct VSpectrum {
  Eigen::VectorXd values;     // ascending, pencil G x = lambda N x
  Eigen::VectorXd kernel;     // eigenvector of the smallest value
  double kernel_cosine = 0.0;  // |cos| between kernel and nu
  double symmetry_defect = 0.0;  // max|G - G^T| / max|G|
  double min_raw_eigenvalue = 0.0;  // smallest eigenvalue of sym(G)
};

/// Whole-box Stokes operator with viscosity mu; realizes the Newtonian and
/// single-layer potentials and the boundary operators built from them.
class WholeSpaceStokes {
 public:
  WholeSpaceStokes(const Spaces& spaces, const ViscosityField& mu, SolveOptions options = {});

  const Spaces& spaces() const { return *spaces_; }
  const AssembledForms& forms() const { return forms_; }
  const ViscosityField& viscosity() const { return mu_; }
  const DiscreteStokes& discrete() const { return *stokes_; }

  /// Solves a(u,v) + b(v,p) = <load,v>, b(u,q) = 0.
  PotentialPair newtonian(const Eigen::VectorXd& load) const;
  PotentialPair single_layer(const CotraceDensity& phi) const;
  TraceField boundary_V(const CotraceDensity& phi) const;

  /// (t+, t-) of a single-layer pair.
  std::pair<CotraceDensity, CotraceDensity> conormals(const PotentialPair& pair) const;
  CotraceDensity k_star(const CotraceDensity& phi) const;
  JumpReport jump_check(const CotraceDensity& phi) const;

  /// a_mu(u,u).
  double energy(const Eigen::VectorXd& u) const { return u.dot(forms_.A * u); }

  /// Galerkin matrix G_ij = <e_i, V e_j> in the action basis (cached).
  const Eigen::MatrixXd& galerkin_matrix() const;
  /// N = P G_X^{-1} P^T: dual weighted-H^1 Gram of gamma* densities (cached).
  const Eigen::MatrixXd& dual_gram() const;
  VSpectrum spectrum() const;

  /// Density class with V phi = psi; psi must satisfy |<nu,psi>| <= 1e-9 ||nu|| ||psi||.
  QuotientDensity invert_boundary_V(const TraceField& psi, double tol = 1e-10, int max_iter = 500) const;

 private:
  const Spaces* spaces_;
  ViscosityField mu_;
  AssembledForms forms_;
  std::unique_ptr<DiscreteStokes> stokes_;
  mutable Eigen::MatrixXd galerkin_, dual_gram_;
};

/// Removes the <nu,.> component of a trace field along Riesz(nu), giving an
/// element of the nu-orthogonal trace space.
TraceField project_nu_orthogonal(const TraceSpace& space, const TraceField& psi);

}  // namespace varstokes
