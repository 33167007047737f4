#pragma once

#include <memory>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace varstokes {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// True when CHOLMOD's supernodal factorization reproduces a dense SPD test
/// solve; the supernodal path runs on the system BLAS, and some optimized
/// BLAS builds return wrong triangular solves on AVX-512 hardware.
bool supernodal_factorization_reliable();

/// Sparse Cholesky factorization of an SPD matrix: CHOLMOD supernodal when
/// the BLAS passes the check above, simplicial (no BLAS) otherwise.
class SparseCholesky {
 public:
  explicit SparseCholesky(const SparseMatrix& a);
  ~SparseCholesky();
  SparseCholesky(SparseCholesky&&) noexcept;
  SparseCholesky& operator=(SparseCholesky&&) noexcept;

  int dim() const { return dim_; }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int dim_ = 0;
};

struct EigenPairs {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns, B-orthonormal; empty unless requested
};

/// Eigenvalues il..iu (1-based, ascending) of the symmetric-definite pencil
/// A x = lambda B x. Throws SolverError when B is not positive definite.
EigenPairs generalized_eigen_range(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int il, int iu,
                                   bool vectors);
/// All eigenvalues of A x = lambda B x, ascending.
Eigen::VectorXd generalized_eigenvalues(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
/// All eigenpairs of a symmetric matrix, ascending.
EigenPairs symmetric_eigen(const Eigen::MatrixXd& a, bool vectors);

}  // namespace varstokes
