#include "varstokes/linalg.hpp"

#include <cmath>
#include <string>

#include <Eigen/CholmodSupport>
#include <Eigen/Eigenvalues>

#include "varstokes/errors.hpp"

namespace varstokes {

struct SparseCholesky::Impl {
  std::unique_ptr<Eigen::CholmodSupernodalLLT<SparseMatrix, Eigen::Lower>> supernodal;
  std::unique_ptr<Eigen::CholmodSimplicialLLT<SparseMatrix, Eigen::Lower>> simplicial;
};

bool supernodal_factorization_reliable() {
  static const bool ok = [] {
    // dense SPD test matrix: one supernode, so CHOLMOD runs potrf/trsm/syrk on 300x300 blocks
    const int n = 300;
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) m(i, j) = 1.0 / (1.0 + std::abs(i - j)) + std::sin(0.37 * (i + 1) * (j + 1)) * 1e-2;
    }
    m = 0.5 * (m + m.transpose()).eval();
    m.diagonal().array() += n;
    const SparseMatrix a = m.sparseView();
    Eigen::CholmodSupernodalLLT<SparseMatrix, Eigen::Lower> llt;
    llt.cholmod().print = 0;
    llt.compute(a);
    if (llt.info() != Eigen::Success) return false;
    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(n, -1.0, 2.0);
    const Eigen::VectorXd x = llt.solve(b);
    return x.allFinite() && (m * x - b).norm() <= 1e-10 * b.norm();
  }();
  return ok;
}

SparseCholesky::SparseCholesky(const SparseMatrix& a) : impl_(std::make_unique<Impl>()), dim_(static_cast<int>(a.rows())) {
  if (a.rows() == 0 || a.rows() != a.cols()) {
    throw PreconditionError("sparse Cholesky needs a nonempty square matrix (got " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + ")");
  }
  bool ok = false;
  if (supernodal_factorization_reliable()) {
    impl_->supernodal = std::make_unique<Eigen::CholmodSupernodalLLT<SparseMatrix, Eigen::Lower>>(a);
    ok = impl_->supernodal->info() == Eigen::Success;
  } else {
    impl_->simplicial = std::make_unique<Eigen::CholmodSimplicialLLT<SparseMatrix, Eigen::Lower>>(a);
    ok = impl_->simplicial->info() == Eigen::Success;
  }
  if (!ok) throw SolverError("sparse Cholesky factorization failed (matrix not positive definite?)");
}

SparseCholesky::~SparseCholesky() = default;
SparseCholesky::SparseCholesky(SparseCholesky&&) noexcept = default;
SparseCholesky& SparseCholesky::operator=(SparseCholesky&&) noexcept = default;

Eigen::VectorXd SparseCholesky::solve(const Eigen::VectorXd& b) const {
  return impl_->supernodal ? Eigen::VectorXd(impl_->supernodal->solve(b)) : Eigen::VectorXd(impl_->simplicial->solve(b));
}

Eigen::MatrixXd SparseCholesky::solve(const Eigen::MatrixXd& b) const {
  return impl_->supernodal ? Eigen::MatrixXd(impl_->supernodal->solve(b)) : Eigen::MatrixXd(impl_->simplicial->solve(b));
}

namespace {

Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> pencil(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                                                  bool vectors) {
  // Eigen does not report a failed Cholesky factorization of b
  if (Eigen::LLT<Eigen::MatrixXd>(b).info() != Eigen::Success) {
    throw SolverError("generalized eigensolver: B is not positive definite");
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
      a, b, (vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly) | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw SolverError("generalized eigensolver failed (B not positive definite?)");
  return es;
}

}  // namespace

EigenPairs generalized_eigen_range(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int il, int iu,
                                   bool vectors) {
  const int n = static_cast<int>(a.rows());
  if (n == 0) return {};
  if (il < 1 || iu > n || il > iu) {
    throw PreconditionError("eigenvalue range " + std::to_string(il) + ".." + std::to_string(iu) + " outside 1.." +
                            std::to_string(n));
  }
  const auto es = pencil(a, b, vectors);
  const int count = iu - il + 1;
  EigenPairs out;
  out.values = es.eigenvalues().segment(il - 1, count);
  if (vectors) {
    out.vectors = es.eigenvectors().middleCols(il - 1, count);
    for (int j = 0; j < count; ++j) {
      out.vectors.col(j) /= std::sqrt(out.vectors.col(j).dot(b * out.vectors.col(j)));
    }
  }
  return out;
}

Eigen::VectorXd generalized_eigenvalues(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() == 0) return {};
  return pencil(a, b, false).eigenvalues();
}

EigenPairs symmetric_eigen(const Eigen::MatrixXd& a, bool vectors) {
  EigenPairs out;
  if (a.rows() == 0) return out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw SolverError("symmetric eigensolver failed to converge");
  out.values = es.eigenvalues();
  if (vectors) out.vectors = es.eigenvectors();
  return out;
}

}  // namespace varstokes
