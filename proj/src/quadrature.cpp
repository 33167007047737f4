#include "varstokes/quadrature.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace varstokes {

namespace {

TetRule make_tet_rule() {
  TetRule rule;
  auto add_class_4 = [&rule](double a, double w) {
    const double b = 1.0 - 3.0 * a;
    rule.push_back({{b, a, a, a}, w});
    rule.push_back({{a, b, a, a}, w});
    rule.push_back({{a, a, b, a}, w});
    rule.push_back({{a, a, a, b}, w});
  };
  add_class_4(0.31088591926330060980, 0.11268792571801585080);
  add_class_4(0.092735250310891226402, 0.073493043116361949544);

  const double a = 0.045503704125649649492;
  const double b = 0.5 - a;
  const double w = 0.042546020777081466438;
  rule.push_back({{a, a, b, b}, w});
  rule.push_back({{a, b, a, b}, w});
  rule.push_back({{a, b, b, a}, w});
  rule.push_back({{b, a, a, b}, w});
  rule.push_back({{b, a, b, a}, w});
  rule.push_back({{b, b, a, a}, w});
  return rule;
}

TriRule make_tri_rule() {
  const double s = std::sqrt(15.0);
  const double a1 = (6.0 - s) / 21.0;
  const double a2 = (6.0 + s) / 21.0;
  const double w1 = (155.0 - s) / 1200.0;
  const double w2 = (155.0 + s) / 1200.0;
  TriRule rule;
  rule.push_back({{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 9.0 / 40.0});
  for (auto [a, w] : {std::pair{a1, w1}, std::pair{a2, w2}}) {
    const double b = 1.0 - 2.0 * a;
    rule.push_back({{b, a, a}, w});
    rule.push_back({{a, b, a}, w});
    rule.push_back({{a, a, b}, w});
  }
  return rule;
}

// Gauss-Legendre on (0,1) by Golub-Welsch.
void gauss_legendre(int k, std::vector<double>& x, std::vector<double>& w) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(k, k);
  for (int i = 1; i < k; ++i) J(i, i - 1) = J(i - 1, i) = i / std::sqrt(4.0 * i * i - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  x.resize(k);
  w.resize(k);
  for (int i = 0; i < k; ++i) {
    x[i] = 0.5 * (1.0 + es.eigenvalues()[i]);
    w[i] = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
  }
}

// Collapsed (Duffy) product rule with k points per axis: exact to degree 2k-2.
TriRule make_collapsed_tri_rule(int k) {
  std::vector<double> x, w;
  gauss_legendre(k, x, w);
  TriRule rule;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const double l1 = x[i];
      const double l2 = (1.0 - x[i]) * x[j];
      rule.push_back({{1.0 - l1 - l2, l1, l2}, 2.0 * w[i] * w[j] * (1.0 - x[i])});
    }
  }
  return rule;
}

}  // namespace

const TetRule& tet_rule_degree5() {
  static const TetRule rule = make_tet_rule();
  return rule;
}

const TriRule& tri_rule_degree5() {
  static const TriRule rule = make_tri_rule();
  return rule;
}

const TriRule& tri_rule_degree8() {
  static const TriRule rule = make_collapsed_tri_rule(5);
  return rule;
}

}  // namespace varstokes
