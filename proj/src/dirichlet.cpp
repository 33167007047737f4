#include "varstokes/dirichlet.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "varstokes/errors.hpp"

namespace varstokes {

const char* method_name(ExteriorSolution::Method m) {
  return m == ExteriorSolution::Method::Variational ? "variational" : "potential";
}

ExteriorSolver::ExteriorSolver(const Spaces& spaces, const ViscosityField& mu, SolveOptions options)
    : spaces_(&spaces), mu_(mu), options_(options), forms_(assemble(mu, spaces)) {
  const VelocitySpace& vs = spaces.velocity;
  exterior_ = std::make_unique<DiscreteStokes>(spaces, forms_.A_minus, forms_.B_minus, Domain::Exterior, options);
  // the exterior operator already has constant coefficients unless mu is a checkerboard
  if (mu.kind() == ViscosityField::Kind::Checkerboard) {
    const std::vector<double> ones(vs.mesh().num_cells(), 1.0);
    lifting_ = std::make_unique<DiscreteStokes>(spaces, assemble_viscous(vs, ones, CellSet::Exterior),
                                                forms_.B_minus, Domain::Exterior, options);
  }

  // source flow s(x) = x / (4 pi |x|^3) on the outer nodes
  unit_datum_ = vs.interpolate([](const Vec3& x) { return Vec3(x / (4.0 * std::numbers::pi * std::pow(x.norm(), 3))); });
  for (int d = 0; d < vs.dim(); ++d) {
    if (!vs.dof_on_outer(d)) unit_datum_[d] = 0.0;
  }
  // discrete outward flux through the outer boundary: -sum_K b(u, 1_K) over Omega_- cells
  const double flux = -(forms_.B_minus * unit_datum_).sum();
  unit_datum_ /= flux;
}

Eigen::VectorXd ExteriorSolver::outer_datum(double flux) const { return flux * unit_datum_; }

Eigen::VectorXd ExteriorSolver::restrict_to_exterior(const Eigen::VectorXd& u) const {
  Eigen::VectorXd r = u;
  const VelocitySpace& vs = spaces_->velocity;
  for (int d = 0; d < vs.dim(); ++d) {
    if (vs.dof_interior(d)) r[d] = 0.0;
  }
  return r;
}

Eigen::VectorXd ExteriorSolver::build_lifting(const TraceField& phi) const {
  const TraceSpace& ts = spaces_->trace;
  const double q = normal_density(ts).action.dot(phi.coeffs);
  Eigen::VectorXd data = lift(ts, phi) + outer_datum(q);
  if (phi.coeffs.norm() == 0.0) return data;
  const DiscreteStokes& aux = lifting_ ? *lifting_ : *exterior_;
  return aux.solve(Eigen::VectorXd::Zero(data.size()), data).u;
}

ExteriorSolution ExteriorSolver::solve_variational(const ExteriorProblem& problem) const {
  const Eigen::VectorXd u0 = build_lifting(problem.phi);
  const StokesResult r = exterior_->solve(-problem.force, u0);
  ExteriorSolution s;
  s.method = ExteriorSolution::Method::Variational;
  s.u = r.u;
  s.p = r.p;
  s.momentum_residual = r.momentum_residual;
  s.constraint_residual = r.constraint_residual;
  s.trace_error = (trace(spaces_->trace, s.u).coeffs - problem.phi.coeffs).norm();
  return s;
}

const WholeSpaceStokes& ExteriorSolver::whole() const {
  if (!whole_) whole_ = std::make_unique<WholeSpaceStokes>(*spaces_, mu_, options_);
  return *whole_;
}

ExteriorSolution ExteriorSolver::solve_potential(const ExteriorProblem& problem) const {
  const TraceSpace& ts = spaces_->trace;
  const Eigen::VectorXd nu = normal_density(ts).action;
  const double flux = nu.dot(problem.phi.coeffs);
  if (std::abs(flux) > 1e-9 * nu.norm() * problem.phi.coeffs.norm()) {
    std::ostringstream msg;
    msg << "potential representation needs a datum with <nu,phi> = 0 (phi in H_nu^{1/2}); got <nu,phi> = "
        << flux;
    throw PreconditionError(msg.str());
  }
  const WholeSpaceStokes& w = whole();
  const PotentialPair newt = w.newtonian(-extend_force(spaces_->velocity, problem.force));
  // gamma of a discretely solenoidal field is nu-orthogonal up to solver noise
  const TraceField psi =
      project_nu_orthogonal(ts, {problem.phi.coeffs - trace(ts, newt.u).coeffs});
  const QuotientDensity density = w.invert_boundary_V(psi, options_.tol);
  const PotentialPair layer = w.single_layer(density.representative);

  ExteriorSolution s;
  s.method = ExteriorSolution::Method::Potential;
  s.u = restrict_to_exterior(newt.u + layer.u);
  s.p = newt.p + layer.p;
  const Mesh& mesh = spaces_->velocity.mesh();
  for (int c = 0; c < mesh.num_cells(); ++c) {
    if (mesh.cell_region[c] == Region::Interior) {
      for (int l = 0; l < spaces_->pressure.dofs_per_cell(); ++l) s.p[spaces_->pressure.cell_dof(c, l)] = 0.0;
    }
  }
  exterior_->normalize_pressure(s.p);
  s.momentum_residual = std::max(newt.momentum_residual, layer.momentum_residual);
  s.constraint_residual = std::max(newt.constraint_residual, layer.constraint_residual);
  s.trace_error = (trace(ts, s.u).coeffs - problem.phi.coeffs).norm();
  return s;
}

Eigen::VectorXd extend_force(const VelocitySpace& velocity, const Eigen::VectorXd& force) {
  Eigen::VectorXd f = force;
  for (int d = 0; d < velocity.dim(); ++d) {
    if (velocity.dof_interior(d)) f[d] = 0.0;
  }
  return f;
}

}  // namespace varstokes
