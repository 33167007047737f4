#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "varstokes/linalg.hpp"

namespace varstokes {

/// Mixed problem  A u + B^T p = f,  B u = g.
struct SaddleSystem {
  SparseMatrix A;  // n x n, symmetric
  SparseMatrix B;  // m x n
  Eigen::VectorXd f, g;
  SparseMatrix gram_x;  // X-norm Gram (n x n)
  SparseMatrix gram_m;  // M-norm Gram (m x m)
  /// Velocity DOFs held at zero.
  std::vector<int> pinned;
  /// Known null vector of B^T (e.g. constant pressures); empty if none. The
  /// pressure is returned orthogonal to it.
  Eigen::VectorXd pressure_kernel;
};

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 2000;
  /// Pressure dimension up to which the Schur complement is formed and factorized.
  int dense_schur_limit = 4000;
};

struct SaddleSolution {
  Eigen::VectorXd u, p;
  double momentum_residual = 0.0;    // ||A u + B^T p - f|| / ||f||
  double constraint_residual = 0.0;  // ||B u - g|| / max(||g||, ||f||)
  int iterations = 0;
  std::vector<double> history;
};

/// Schur-complement solver with a Cholesky factorization of A. The complement
/// S = B A^{-1} B^T is factorized densely for small pressure spaces and
/// otherwise handled by projected PCG.
class SaddleSolver {
 public:
  SaddleSolver(SparseMatrix a, SparseMatrix b, Eigen::VectorXd pressure_kernel, SolveOptions options = {});
  ~SaddleSolver();
  SaddleSolver(SaddleSolver&&) noexcept;
  SaddleSolver& operator=(SaddleSolver&&) noexcept;

  int velocity_dim() const { return static_cast<int>(a_.rows()); }
  int pressure_dim() const { return static_cast<int>(b_.rows()); }
  bool dense_schur() const;
  const SolveOptions& options() const { return options_; }

  /// Throws SolverError (with residual history) if the tolerance is not met.
  SaddleSolution solve(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const;
  /// Column-wise solve of several right-hand sides.
  void solve_block(const Eigen::MatrixXd& f, const Eigen::MatrixXd& g, Eigen::MatrixXd& u, Eigen::MatrixXd& p) const;

 private:
  struct Dense;
  Eigen::VectorXd schur_rhs(const Eigen::VectorXd& au_f, const Eigen::VectorXd& g) const;
  Eigen::VectorXd project(const Eigen::VectorXd& q) const;
  Eigen::VectorXd pcg(const Eigen::VectorXd& r, double target, std::vector<double>& history, int& iterations) const;

  SparseMatrix a_, b_;
  SparseMatrix bt_;
  Eigen::VectorXd kernel_;  // unit vector or empty
  SolveOptions options_;
  std::unique_ptr<SparseCholesky> chol_;
  std::unique_ptr<Dense> dense_;
  Eigen::VectorXd precond_;  // inverse diagonal approximation of S
};

SaddleSolution solve(const SaddleSystem& sys, double tol = 1e-10, int max_iter = 2000);

struct InfSupReport {
  double beta = 0.0;    // discrete inf-sup constant
  /// Pencil eigenvalues below 1e-10 * largest after kernel deflation (spurious pressure modes).
  int spurious_modes = 0;
  /// beta over the complement of the spurious modes.
  double beta_filtered = 0.0;
  double lambda = 0.0;  // coercivity constant of A on Ker B (NaN if not computed)
  double a_norm = 0.0;  // continuity constant of A in the X norm
  std::string method;
  int velocity_dim = 0;
  int pressure_dim = 0;
};

/// beta from the pencil B G_X^{-1} B^T q = beta^2 G_M q (known pressure kernel
/// deflated); lambda from check_coercivity when the velocity space has at most
/// `dense_limit` DOFs.
InfSupReport estimate_inf_sup(const SaddleSystem& sys, int dense_limit = 3000);

/// Smallest eigenvalue of (Z^T A Z, Z^T G_X Z) over a dense basis Z of Ker B.
double check_coercivity(const SaddleSystem& sys);

/// beta as the smallest singular value of L_X^{-1} B^T L_M^{-T} (Cholesky
/// factors of the Gram matrices), kernel direction removed. Dense.
double dual_inf_sup(const SaddleSystem& sys);

/// Largest eigenvalue of (A, G_X).
double continuity_constant(const SaddleSystem& sys);

/// C in ||u||_X + ||p||_M <= C (||f||_X* + ||g||_M*) from the Brezzi bounds.
double stability_constant(const InfSupReport& report);

/// sqrt(v^T G^{-1} v).
double dual_norm(const SparseMatrix& gram, const Eigen::VectorXd& v);
/// sqrt(v^T G v).
double gram_norm(const SparseMatrix& gram, const Eigen::VectorXd& v);

}  // namespace varstokes
