#include "varstokes/saddle.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "varstokes/errors.hpp"

namespace varstokes {

namespace {

struct Reduced {
  SparseMatrix A, B, gram_x;
  Eigen::VectorXd f;
  std::vector<int> kept;  // free velocity DOFs
};

// Drop pinned velocity DOFs (rows and columns).
Reduced reduce(const SaddleSystem& sys) {
  const int n = static_cast<int>(sys.A.rows());
  std::vector<int> map(n, 0);
  for (int i : sys.pinned) map[i] = -1;
  Reduced r;
  for (int i = 0; i < n; ++i) {
    if (map[i] == 0) {
      map[i] = static_cast<int>(r.kept.size());
      r.kept.push_back(i);
    }
  }
  if (sys.pinned.empty()) {
    r.A = sys.A;
    r.B = sys.B;
    r.gram_x = sys.gram_x;
    r.f = sys.f;
    return r;
  }
  const int nk = static_cast<int>(r.kept.size());
  auto restrict_cols = [&](const SparseMatrix& m, bool rows_too) {
    std::vector<Eigen::Triplet<double>> t;
    for (int k = 0; k < m.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
        const int c = map[it.col()];
        const int row = rows_too ? map[it.row()] : static_cast<int>(it.row());
        if (c >= 0 && row >= 0) t.emplace_back(row, c, it.value());
      }
    }
    SparseMatrix out(rows_too ? nk : m.rows(), nk);
    out.setFromTriplets(t.begin(), t.end());
    return out;
  };
  r.A = restrict_cols(sys.A, true);
  r.B = restrict_cols(sys.B, false);
  if (sys.gram_x.size() > 0) r.gram_x = restrict_cols(sys.gram_x, true);
  if (sys.f.size() > 0) {
    r.f.resize(nk);
    for (int i = 0; i < nk; ++i) r.f[i] = sys.f[r.kept[i]];
  }
  return r;
}

}  // namespace

struct SaddleSolver::Dense {
  Eigen::MatrixXd Y;  // A^{-1} B^T
  Eigen::LLT<Eigen::MatrixXd> S;
};

SaddleSolver::SaddleSolver(SparseMatrix a, SparseMatrix b, Eigen::VectorXd pressure_kernel, SolveOptions options)
    : a_(std::move(a)), b_(std::move(b)), options_(options) {
  if (a_.rows() != a_.cols() || b_.cols() != a_.rows()) throw PreconditionError("saddle system dimensions mismatch");
  bt_ = b_.transpose();
  if (pressure_kernel.size() > 0) {
    if (pressure_kernel.size() != b_.rows()) throw PreconditionError("pressure kernel has wrong dimension");
    kernel_ = pressure_kernel.normalized();
  }
  chol_ = std::make_unique<SparseCholesky>(a_);
  const int m = pressure_dim();
  if (dense_schur()) {
    dense_ = std::make_unique<Dense>();
    dense_->Y = chol_->solve(Eigen::MatrixXd(bt_));
    Eigen::MatrixXd S = b_ * dense_->Y;
    S = 0.5 * (S + S.transpose());
    if (kernel_.size() > 0) {
      const double shift = m > 0 && S.trace() > 0 ? S.trace() / m : 1.0;
      S.noalias() += shift * kernel_ * kernel_.transpose();
    }
    dense_->S.compute(S);
    if (dense_->S.info() != Eigen::Success) {
      throw SolverError("Schur complement is singular: B lacks full row rank on the free velocity space");
    }
  } else {
    Eigen::VectorXd adiag = a_.diagonal();
    precond_ = Eigen::VectorXd::Zero(m);
    for (int k = 0; k < bt_.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(bt_, k); it; ++it) precond_[k] += it.value() * it.value() / adiag[it.row()];
    }
    for (int i = 0; i < m; ++i) precond_[i] = precond_[i] > 0 ? 1.0 / precond_[i] : 0.0;
  }
}

SaddleSolver::~SaddleSolver() = default;
SaddleSolver::SaddleSolver(SaddleSolver&&) noexcept = default;
SaddleSolver& SaddleSolver::operator=(SaddleSolver&&) noexcept = default;

bool SaddleSolver::dense_schur() const { return pressure_dim() <= options_.dense_schur_limit; }

Eigen::VectorXd SaddleSolver::project(const Eigen::VectorXd& q) const {
  if (kernel_.size() == 0) return q;
  return q - kernel_ * kernel_.dot(q);
}

Eigen::VectorXd SaddleSolver::schur_rhs(const Eigen::VectorXd& ainv_f, const Eigen::VectorXd& g) const {
  Eigen::VectorXd r = b_ * ainv_f - g;
  if (kernel_.size() > 0) {
    const double defect = std::abs(kernel_.dot(g));
    if (defect > 1e-8 * std::max({g.norm(), r.norm(), 1e-300})) {
      std::ostringstream msg;
      msg << "constraint data incompatible with the pressure kernel (component " << defect << ")";
      throw PreconditionError(msg.str());
    }
  }
  return project(r);
}

Eigen::VectorXd SaddleSolver::pcg(const Eigen::VectorXd& r, double target, std::vector<double>& history,
                                  int& iterations) const {
  const int m = pressure_dim();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd res = r;
  history.push_back(res.norm());
  if (res.norm() <= target) return x;
  Eigen::VectorXd z = project(precond_.cwiseProduct(res));
  Eigen::VectorXd d = z;
  double rz = res.dot(z);
  for (iterations = 1; iterations <= options_.max_iter; ++iterations) {
    const Eigen::VectorXd Sd = project(b_ * chol_->solve(Eigen::VectorXd(bt_ * d)));
    const double dSd = d.dot(Sd);
    if (!(dSd > 0.0)) throw SolverError("Schur complement CG breakdown (indefinite or singular complement)", history);
    const double alpha = rz / dSd;
    x += alpha * d;
    res -= alpha * Sd;
    history.push_back(res.norm());
    if (res.norm() <= target) return x;
    z = project(precond_.cwiseProduct(res));
    const double rz_new = res.dot(z);
    d = z + (rz_new / rz) * d;
    rz = rz_new;
  }
  std::ostringstream msg;
  msg << "Schur complement CG did not converge in " << options_.max_iter << " iterations (residual "
      << history.back() << ", target " << target << "); a vanishing inf-sup constant is the likely cause";
  throw SolverError(msg.str(), history);
}

SaddleSolution SaddleSolver::solve(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
  SaddleSolution sol;
  const int n = velocity_dim();
  const int m = pressure_dim();
  const double fn = f.norm();
  const double scale = std::max(g.norm(), fn);
  if (scale == 0.0) {
    sol.u = Eigen::VectorXd::Zero(n);
    sol.p = Eigen::VectorXd::Zero(m);
    return sol;
  }
  const Eigen::VectorXd w = chol_->solve(f);
  const Eigen::VectorXd r = schur_rhs(w, g);
  if (dense_) {
    sol.p = project(dense_->S.solve(r));
    sol.u = w - dense_->Y * sol.p;
    sol.iterations = 1;
  } else {
    sol.p = pcg(r, 0.5 * options_.tol * scale, sol.history, sol.iterations);
    sol.u = chol_->solve(Eigen::VectorXd(f - bt_ * sol.p));
  }
  sol.momentum_residual = (a_ * sol.u + bt_ * sol.p - f).norm() / (fn > 0.0 ? fn : scale);
  sol.constraint_residual = (b_ * sol.u - g).norm() / scale;
  if (sol.history.empty()) sol.history.push_back(sol.constraint_residual);
  if (sol.constraint_residual > options_.tol || sol.momentum_residual > options_.tol) {
    std::ostringstream msg;
    msg << "saddle solve missed tolerance " << options_.tol << ": momentum residual " << sol.momentum_residual
        << ", constraint residual " << sol.constraint_residual;
    throw SolverError(msg.str(), sol.history);
  }
  return sol;
}

void SaddleSolver::solve_block(const Eigen::MatrixXd& f, const Eigen::MatrixXd& g, Eigen::MatrixXd& u,
                               Eigen::MatrixXd& p) const {
  const int k = static_cast<int>(f.cols());
  if (!dense_) {
    u.resize(velocity_dim(), k);
    p.resize(pressure_dim(), k);
    for (int j = 0; j < k; ++j) {
      const SaddleSolution s = solve(f.col(j), g.col(j));
      u.col(j) = s.u;
      p.col(j) = s.p;
    }
    return;
  }
  const Eigen::MatrixXd w = chol_->solve(f);
  Eigen::MatrixXd r = b_ * w - g;
  if (kernel_.size() > 0) r -= kernel_ * (kernel_.transpose() * r);
  p = dense_->S.solve(r);
  if (kernel_.size() > 0) p -= kernel_ * (kernel_.transpose() * p);
  u = w - dense_->Y * p;
  for (int j = 0; j < k; ++j) {
    const double scale = std::max(f.col(j).norm(), g.col(j).norm());
    if (scale == 0.0) continue;
    const double res = (b_ * u.col(j) - g.col(j)).norm() / scale;
    if (res > options_.tol) {
      throw SolverError("block saddle solve missed tolerance in column " + std::to_string(j), {res});
    }
  }
}

SaddleSolution solve(const SaddleSystem& sys, double tol, int max_iter) {
  const Reduced r = reduce(sys);
  SolveOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  SaddleSolver solver(r.A, r.B, sys.pressure_kernel, opts);
  SaddleSolution sol = solver.solve(r.f, sys.g);
  if (!sys.pinned.empty()) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(sys.A.rows());
    for (std::size_t i = 0; i < r.kept.size(); ++i) full[r.kept[i]] = sol.u[i];
    sol.u = std::move(full);
  }
  return sol;
}

double continuity_constant(const SaddleSystem& sys) {
  const Reduced r = reduce(sys);
  const int n = static_cast<int>(r.A.rows());
  if (n == 0) return 0.0;
  if (n <= 3000) {
    const EigenPairs e =
        generalized_eigen_range(Eigen::MatrixXd(r.A), Eigen::MatrixXd(r.gram_x), n, n, false);
    return e.values[0];
  }
  // power iteration on G_X^{-1} A
  SparseCholesky g(r.gram_x);
  std::mt19937 rng(7);
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = normal(rng);
  double lam = 0.0;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd y = g.solve(Eigen::VectorXd(r.A * x));
    const double next = x.dot(r.A * x) / x.dot(r.gram_x * x);
    x = y / std::sqrt(y.dot(r.gram_x * y));
    if (it > 10 && std::abs(next - lam) <= 1e-10 * next) {
      lam = next;
      break;
    }
    lam = next;
  }
  return lam;
}

double check_coercivity(const SaddleSystem& sys) {
  const Reduced r = reduce(sys);
  const int n = static_cast<int>(r.A.rows());
  const Eigen::MatrixXd bt = Eigen::MatrixXd(r.B).transpose();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(bt);
  qr.setThreshold(1e-12);
  const int rank = bt.cols() > 0 ? static_cast<int>(qr.rank()) : 0;
  if (n - rank <= 0) return std::numeric_limits<double>::quiet_NaN();
  const Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd z = q.rightCols(n - rank);
  const Eigen::MatrixXd za = z.transpose() * Eigen::MatrixXd(r.A) * z;
  const Eigen::MatrixXd zg = z.transpose() * Eigen::MatrixXd(r.gram_x) * z;
  const EigenPairs e = generalized_eigen_range(0.5 * (za + za.transpose()), 0.5 * (zg + zg.transpose()), 1, 1, false);
  return e.values[0];
}

InfSupReport estimate_inf_sup(const SaddleSystem& sys, int dense_limit) {
  const Reduced r = reduce(sys);
  InfSupReport report;
  report.velocity_dim = static_cast<int>(r.A.rows());
  report.pressure_dim = static_cast<int>(r.B.rows());
  report.method = "pencil B G_X^-1 B^T q = beta^2 G_M q";
  const int m = report.pressure_dim;
  if (m == 0) throw PreconditionError("inf-sup estimate needs a nonempty pressure space");
  SparseCholesky gx(r.gram_x);
  Eigen::MatrixXd S = r.B * gx.solve(Eigen::MatrixXd(Eigen::MatrixXd(r.B).transpose()));
  S = 0.5 * (S + S.transpose());
  const Eigen::MatrixXd gm = Eigen::MatrixXd(sys.gram_m);
  if (sys.pressure_kernel.size() > 0) {
    const Eigen::VectorXd v = gm * sys.pressure_kernel;
    const double sigma = gm.ldlt().solve(S).trace() + 1.0;
    S.noalias() += (sigma / sys.pressure_kernel.dot(v)) * v * v.transpose();
    report.method += ", pressure kernel deflated";
  }
  const Eigen::VectorXd ev = generalized_eigenvalues(S, gm);
  report.beta = std::sqrt(std::max(0.0, ev[0]));
  const double floor = 1e-10 * ev[m - 1];
  while (report.spurious_modes < m && ev[report.spurious_modes] <= floor) ++report.spurious_modes;
  report.beta_filtered = report.spurious_modes < m ? std::sqrt(ev[report.spurious_modes]) : 0.0;
  report.a_norm = continuity_constant(sys);
  report.lambda =
      report.velocity_dim <= dense_limit ? check_coercivity(sys) : std::numeric_limits<double>::quiet_NaN();
  return report;
}

double dual_inf_sup(const SaddleSystem& sys) {
  const Reduced r = reduce(sys);
  const Eigen::MatrixXd gx = Eigen::MatrixXd(r.gram_x);
  const Eigen::MatrixXd gm = Eigen::MatrixXd(sys.gram_m);
  Eigen::LLT<Eigen::MatrixXd> lx(gx), lm(gm);
  if (lx.info() != Eigen::Success || lm.info() != Eigen::Success) throw SolverError("Gram matrix not SPD");
  // C = L_X^{-1} B^T L_M^{-T}
  Eigen::MatrixXd c = lx.matrixL().solve(Eigen::MatrixXd(Eigen::MatrixXd(r.B).transpose()));
  c = lm.matrixL().solve(c.transpose()).transpose();
  const int m = static_cast<int>(c.cols());
  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(m, m);
  if (sys.pressure_kernel.size() > 0) {
    const Eigen::VectorXd kt = (lm.matrixU() * sys.pressure_kernel).normalized();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(kt);
    const Eigen::MatrixXd q = qr.householderQ();
    w = q.rightCols(m - 1);
  }
  const Eigen::MatrixXd cw = c * w;
  if (cw.cols() > cw.rows()) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(cw);
  return svd.singularValues().minCoeff();
}

double stability_constant(const InfSupReport& report) {
  const double lam = report.lambda;
  const double beta = report.beta;
  const double a = report.a_norm;
  const double k = 1.0 + a / lam;
  const double coef_f = 1.0 / lam + k / beta;
  const double coef_g = k / beta + a / (beta * beta) * k;
  return std::max(coef_f, coef_g);
}

double dual_norm(const SparseMatrix& gram, const Eigen::VectorXd& v) {
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(gram);
  if (ldlt.info() != Eigen::Success) throw SolverError("Gram matrix factorization failed");
  return std::sqrt(std::max(0.0, v.dot(ldlt.solve(v))));
}

double gram_norm(const SparseMatrix& gram, const Eigen::VectorXd& v) { return std::sqrt(std::max(0.0, v.dot(gram * v))); }

}  // namespace varstokes
