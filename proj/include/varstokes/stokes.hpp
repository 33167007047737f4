#pragma once

#include <memory>

#include "varstokes/fespace.hpp"
#include "varstokes/saddle.hpp"

namespace varstokes {

struct StokesResult {
  Eigen::VectorXd u;  // full velocity vector
  Eigen::VectorXd p;  // full pressure vector, zero outside the domain, shell normalized
  double momentum_residual = 0.0;
  double constraint_residual = 0.0;
  int iterations = 0;
};

/// A discretized Stokes problem on the whole box or on Omega_- cut by the box:
/// free velocity DOFs and pressure DOFs of the domain, with the factorized
/// saddle solver. Pressures are returned with zero mean over the outer shell.
class DiscreteStokes {
 public:
  DiscreteStokes(const Spaces& spaces, const SparseMatrix& a_full, const SparseMatrix& b_full, Domain domain,
                 SolveOptions options = {});

  const Spaces& spaces() const { return *spaces_; }
  Domain domain() const { return domain_; }
  const DofRestriction& velocity_dofs() const { return vel_; }
  const DofRestriction& pressure_dofs() const { return pre_; }
  /// Factorized on first use.
  const SaddleSolver& solver() const;

  /// Solves for u = offset + w, w vanishing on all non-free DOFs, with
  /// a(u,v) + b(v,p) = <load,v> for free v and b(u,q) = 0 on the domain.
  /// `offset` carries the Dirichlet data (it may be nonzero on free DOFs).
  StokesResult solve(const Eigen::VectorXd& load, const Eigen::VectorXd& offset = {}) const;
  /// Homogeneous data, several loads (full-size columns). Returns full-size columns.
  void solve_block(const Eigen::MatrixXd& loads, Eigen::MatrixXd& u, Eigen::MatrixXd& p) const;

  /// Subtracts the volume-weighted mean over cells touching the outer boundary.
  void normalize_pressure(Eigen::VectorXd& p) const;
  void normalize_pressure(Eigen::MatrixXd& p) const;

  /// Saddle system in the reduced DOFs with X = weighted H^1 and M = L^2 Grams.
  SaddleSystem system() const;

 private:
  const Spaces* spaces_;
  Domain domain_;
  DofRestriction vel_, pre_;
  SparseMatrix a_full_, b_full_;
  SparseMatrix a_, b_;
  SolveOptions options_;
  mutable std::unique_ptr<SaddleSolver> solver_;
  std::vector<int> shell_cells_;
};

}  // namespace varstokes
