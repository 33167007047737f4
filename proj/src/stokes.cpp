#include "varstokes/stokes.hpp"

#include "varstokes/forms.hpp"

namespace varstokes {

DiscreteStokes::DiscreteStokes(const Spaces& spaces, const SparseMatrix& a_full, const SparseMatrix& b_full,
                               Domain domain, SolveOptions options)
    : spaces_(&spaces),
      domain_(domain),
      vel_(spaces.velocity.dim(), spaces.velocity.free_dofs(domain)),
      pre_(spaces.pressure.dim(), spaces.pressure.domain_dofs(domain)),
      a_full_(a_full),
      b_full_(b_full),
      options_(options) {
  a_ = DofRestriction::restrict(a_full, vel_, vel_);
  b_ = DofRestriction::restrict(b_full, pre_, vel_);
  shell_cells_ = spaces.velocity.mesh().outer_shell_cells();
}

const SaddleSolver& DiscreteStokes::solver() const {
  if (!solver_) solver_ = std::make_unique<SaddleSolver>(a_, b_, Eigen::VectorXd::Ones(pre_.dim()), options_);
  return *solver_;
}

StokesResult DiscreteStokes::solve(const Eigen::VectorXd& load, const Eigen::VectorXd& offset) const {
  Eigen::VectorXd f = vel_.restrict(load);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(pre_.dim());
  if (offset.size() > 0) {
    f -= vel_.restrict(Eigen::VectorXd(a_full_ * offset));
    g = -pre_.restrict(Eigen::VectorXd(b_full_ * offset));
  }
  const SaddleSolution s = solver().solve(f, g);
  StokesResult r;
  r.u = vel_.prolong(s.u);
  if (offset.size() > 0) {
    // offset values on free DOFs are part of u as well
    r.u += offset;
  }
  r.p = pre_.prolong(s.p);
  normalize_pressure(r.p);
  r.momentum_residual = s.momentum_residual;
  r.constraint_residual = s.constraint_residual;
  r.iterations = s.iterations;
  return r;
}

void DiscreteStokes::solve_block(const Eigen::MatrixXd& loads, Eigen::MatrixXd& u, Eigen::MatrixXd& p) const {
  const Eigen::MatrixXd f = vel_.restrict(loads);
  const Eigen::MatrixXd g = Eigen::MatrixXd::Zero(pre_.dim(), loads.cols());
  Eigen::MatrixXd ur, pr;
  solver().solve_block(f, g, ur, pr);
  u = vel_.prolong(ur);
  p = pre_.prolong(pr);
  normalize_pressure(p);
}

void DiscreteStokes::normalize_pressure(Eigen::VectorXd& p) const {
  Eigen::MatrixXd m = p;
  normalize_pressure(m);
  p = m.col(0);
}

void DiscreteStokes::normalize_pressure(Eigen::MatrixXd& p) const {
  const Mesh& mesh = spaces_->velocity.mesh();
  const PressureSpace& ps = spaces_->pressure;
  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(p.cols());
  double vol = 0.0;
  for (int c : shell_cells_) {
    const double v = mesh.volume(c);
    for (int l = 0; l < ps.dofs_per_cell(); ++l) mean += v / ps.dofs_per_cell() * p.row(ps.cell_dof(c, l));
    vol += v;
  }
  mean /= vol;
  for (int i : pre_.kept()) p.row(i) -= mean;
}

SaddleSystem DiscreteStokes::system() const {
  SaddleSystem sys;
  sys.A = a_;
  sys.B = b_;
  const CellSet cells = domain_ == Domain::Whole ? CellSet::All : CellSet::Exterior;
  sys.gram_x = DofRestriction::restrict(assemble_weighted_gram(spaces_->velocity, cells), vel_, vel_);
  sys.gram_m = DofRestriction::restrict(assemble_pressure_mass(spaces_->pressure, cells), pre_, pre_);
  sys.f = Eigen::VectorXd::Zero(vel_.dim());
  sys.g = Eigen::VectorXd::Zero(pre_.dim());
  sys.pressure_kernel = Eigen::VectorXd::Ones(pre_.dim());
  return sys;
}

}  // namespace varstokes
