#include "varstokes/potentials.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "varstokes/errors.hpp"
#include "varstokes/linalg.hpp"

namespace varstokes {

WholeSpaceStokes::WholeSpaceStokes(const Spaces& spaces, const ViscosityField& mu, SolveOptions options)
    : spaces_(&spaces), mu_(mu), forms_(assemble(mu, spaces)) {
  stokes_ = std::make_unique<DiscreteStokes>(spaces, forms_.A, forms_.B, Domain::Whole, options);
}

PotentialPair WholeSpaceStokes::newtonian(const Eigen::VectorXd& load) const {
  const StokesResult r = stokes_->solve(load);
  PotentialPair pair;
  pair.u = r.u;
  pair.p = r.p;
  pair.kind = PotentialPair::Kind::Newtonian;
  pair.momentum_residual = r.momentum_residual;
  pair.constraint_residual = r.constraint_residual;
  return pair;
}

PotentialPair WholeSpaceStokes::single_layer(const CotraceDensity& phi) const {
  PotentialPair pair = newtonian(gamma_star(spaces_->trace, phi));
  pair.kind = PotentialPair::Kind::SingleLayer;
  return pair;
}

TraceField WholeSpaceStokes::boundary_V(const CotraceDensity& phi) const {
  return trace(spaces_->trace, single_layer(phi).u);
}

std::pair<CotraceDensity, CotraceDensity> WholeSpaceStokes::conormals(const PotentialPair& pair) const {
  const Eigen::VectorXd none;
  return {conormal(forms_, spaces_->trace, pair.u, pair.p, none, Side::Plus),
          conormal(forms_, spaces_->trace, pair.u, pair.p, none, Side::Minus)};
}

CotraceDensity WholeSpaceStokes::k_star(const CotraceDensity& phi) const {
  const auto [tp, tm] = conormals(single_layer(phi));
  return {0.5 * (tp.action + tm.action)};
}

JumpReport WholeSpaceStokes::jump_check(const CotraceDensity& phi) const {
  const PotentialPair pair = single_layer(phi);
  const TraceSpace& ts = spaces_->trace;
  JumpReport r;
  r.trace_jump = (trace(ts, pair.u, Side::Plus).coeffs - trace(ts, pair.u, Side::Minus).coeffs).norm();
  const auto [tp, tm] = conormals(pair);
  r.conormal_residual = ts.dual_norm(Eigen::VectorXd(tp.action - tm.action - phi.action));
  return r;
}

const Eigen::MatrixXd& WholeSpaceStokes::galerkin_matrix() const {
  if (galerkin_.size() > 0) return galerkin_;
  const TraceSpace& ts = spaces_->trace;
  const int k = ts.dim();
  Eigen::MatrixXd loads = Eigen::MatrixXd::Zero(spaces_->velocity.dim(), k);
  for (int j = 0; j < k; ++j) loads(ts.velocity_dof(j), j) = 1.0;
  Eigen::MatrixXd u, p;
  stokes_->solve_block(loads, u, p);
  galerkin_.resize(k, k);
  for (int i = 0; i < k; ++i) galerkin_.row(i) = u.row(ts.velocity_dof(i));
  return galerkin_;
}

const Eigen::MatrixXd& WholeSpaceStokes::dual_gram() const {
  if (dual_gram_.size() > 0) return dual_gram_;
  const TraceSpace& ts = spaces_->trace;
  const DofRestriction& vel = stokes_->velocity_dofs();
  const SparseMatrix gx = DofRestriction::restrict(assemble_weighted_gram(spaces_->velocity), vel, vel);
  SparseCholesky chol(gx);
  const int k = ts.dim();
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(vel.dim(), k);
  for (int j = 0; j < k; ++j) rhs(vel.reduced(ts.velocity_dof(j)), j) = 1.0;
  const Eigen::MatrixXd y = chol.solve(rhs);
  dual_gram_.resize(k, k);
  for (int i = 0; i < k; ++i) dual_gram_.row(i) = y.row(vel.reduced(ts.velocity_dof(i)));
  dual_gram_ = 0.5 * (dual_gram_ + dual_gram_.transpose()).eval();
  return dual_gram_;
}

VSpectrum WholeSpaceStokes::spectrum() const {
  const Eigen::MatrixXd& g = galerkin_matrix();
  VSpectrum s;
  s.symmetry_defect = (g - g.transpose()).cwiseAbs().maxCoeff() / g.cwiseAbs().maxCoeff();
  const Eigen::MatrixXd gs = 0.5 * (g + g.transpose());
  s.min_raw_eigenvalue = symmetric_eigen(gs, false).values[0];
  s.values = generalized_eigenvalues(gs, dual_gram());
  const EigenPairs smallest = generalized_eigen_range(gs, dual_gram(), 1, 1, true);
  s.kernel = smallest.vectors.col(0);
  const Eigen::VectorXd nu = normal_density(spaces_->trace).action;
  s.kernel_cosine = std::abs(s.kernel.dot(nu)) / (s.kernel.norm() * nu.norm());
  return s;
}

QuotientDensity WholeSpaceStokes::invert_boundary_V(const TraceField& psi, double tol, int max_iter) const {
  const TraceSpace& ts = spaces_->trace;
  const Eigen::VectorXd nu = normal_density(ts).action;
  const double flux = nu.dot(psi.coeffs);
  if (std::abs(flux) > 1e-9 * nu.norm() * psi.coeffs.norm()) {
    std::ostringstream msg;
    msg << "boundary datum is not nu-orthogonal: <nu,psi> = " << flux << " (relative "
        << flux / (nu.norm() * psi.coeffs.norm()) << ")";
    throw PreconditionError(msg.str());
  }
  const int k = ts.dim();
  if (psi.coeffs.norm() == 0.0) return {{Eigen::VectorXd::Zero(k)}};
  if (galerkin_.size() > 0 || k <= 1500) {
    const Eigen::MatrixXd& g = galerkin_matrix();
    const Eigen::VectorXd c = ts.riesz({nu}).coeffs;
    Eigen::MatrixXd aug(k + 1, k + 1);
    aug.topLeftCorner(k, k) = 0.5 * (g + g.transpose());
    aug.topRightCorner(k, 1) = c;
    aug.bottomLeftCorner(1, k) = c.transpose();
    aug(k, k) = 0.0;
    Eigen::VectorXd rhs(k + 1);
    rhs << psi.coeffs, 0.0;
    const Eigen::VectorXd x = aug.partialPivLu().solve(rhs);
    return normalize_quotient(ts, {x.head(k)});
  }
  // matrix-free CG; psi lies in the range, which is nu-orthogonal
  Eigen::VectorXd x = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd r = psi.coeffs;
  Eigen::VectorXd d = r;
  double rr = r.squaredNorm();
  const double target = tol * psi.coeffs.norm();
  std::vector<double> history{std::sqrt(rr)};
  for (int it = 0; it < max_iter && std::sqrt(rr) > target; ++it) {
    const Eigen::VectorXd gd = boundary_V({d}).coeffs;
    const double alpha = rr / d.dot(gd);
    x += alpha * d;
    r -= alpha * gd;
    const double rr_new = r.squaredNorm();
    d = r + (rr_new / rr) * d;
    rr = rr_new;
    history.push_back(std::sqrt(rr));
  }
  if (std::sqrt(rr) > target) throw SolverError("CG for the boundary operator did not converge", history);
  return normalize_quotient(ts, {x});
}

TraceField project_nu_orthogonal(const TraceSpace& space, const TraceField& psi) {
  const CotraceDensity nu = normal_density(space);
  const Eigen::VectorXd w = space.riesz(nu).coeffs;
  return {psi.coeffs - (nu.action.dot(psi.coeffs) / nu.action.dot(w)) * w};
}

}  // namespace varstokes
