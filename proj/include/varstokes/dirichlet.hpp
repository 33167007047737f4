#pragma once

#include <memory>
#include <string>

#include "varstokes/potentials.hpp"

namespace varstokes {

/// Exterior Dirichlet data: body force as a load vector supported on Omega_-
/// cells and the velocity trace phi on Gamma.
struct ExteriorProblem {
  Eigen::VectorXd force;
  TraceField phi;
};

struct ExteriorSolution {
  enum class Method { Variational, Potential };
  Method method = Method::Variational;
  Eigen::VectorXd u;  // full velocity vector, zero at nodes inside Omega_+
  Eigen::VectorXd p;  // pressure on Omega_- cells, shell normalized
  double momentum_residual = 0.0;
  double constraint_residual = 0.0;
  /// ||gamma u - phi|| (Euclidean, trace coefficients).
  double trace_error = 0.0;
};

const char* method_name(ExteriorSolution::Method m);

/// Solvers for the exterior problem on Omega_- cut by the box.
///
/// On the outer boundary the velocity is Q s(x), s(x) = x/(4 pi |x|^3), with
/// Q = <nu, phi> scaled to the exact discrete flux; it vanishes for
/// nu-orthogonal data and otherwise makes the truncated problem solvable.
class ExteriorSolver {
 public:
  ExteriorSolver(const Spaces& spaces, const ViscosityField& mu, SolveOptions options = {});

  const Spaces& spaces() const { return *spaces_; }
  const AssembledForms& forms() const { return forms_; }
  const DiscreteStokes& discrete() const { return *exterior_; }

  ExteriorSolution solve_variational(const ExteriorProblem& problem) const;
  /// Discretely divergence-free extension of phi into Omega_- (one mu = 1 Stokes solve).
  Eigen::VectorXd build_lifting(const TraceField& phi) const;
  /// u = N(-f~) + V(V^{-1}(phi - gamma N(-f~))) restricted to Omega_-. Requires <nu,phi> = 0.
  ExteriorSolution solve_potential(const ExteriorProblem& problem) const;

  const WholeSpaceStokes& whole() const;
  /// Outer-boundary velocity datum with discrete flux Q.
  Eigen::VectorXd outer_datum(double flux) const;

 private:
  Eigen::VectorXd restrict_to_exterior(const Eigen::VectorXd& u) const;

  const Spaces* spaces_;
  ViscosityField mu_;
  SolveOptions options_;
  AssembledForms forms_;
  std::unique_ptr<DiscreteStokes> exterior_;
  std::unique_ptr<DiscreteStokes> lifting_;
  mutable std::unique_ptr<WholeSpaceStokes> whole_;
  Eigen::VectorXd unit_datum_;  // s(x) on outer nodes scaled to unit discrete flux
};

/// Extension by zero: actions on DOFs of nodes strictly inside Omega_+ set to 0.
Eigen::VectorXd extend_force(const VelocitySpace& velocity, const Eigen::VectorXd& force);

}  // namespace varstokes
