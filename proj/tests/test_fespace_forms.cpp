#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "varstokes/errors.hpp"
#include "varstokes/forms.hpp"
#include "varstokes/quadrature.hpp"

using namespace varstokes;

namespace {

struct Fixture {
  explicit Fixture(int n = 4, int degree = 2, PressureSpace::Kind kind = PressureSpace::Kind::P0, bool bubbles = true)
      : mesh(build_box_mesh({1.0, 2.0, n})), spaces(build_spaces(mesh, degree, kind, bubbles)) {}
  Mesh mesh;
  std::unique_ptr<Spaces> spaces;
};

Eigen::VectorXd random_vector(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

// Cubic field whose divergence 3x^2 y + 2 y z^2 + 3 x z^2 is integrated exactly by the degree-5 rule.
Vec3 cubic(const Vec3& x) { return {x[0] * x[0] * x[0] * x[1], x[1] * x[1] * x[2] * x[2], x[0] * x[2] * x[2] * x[2]}; }
double cubic_div(const Vec3& x) {
  return 3 * x[0] * x[0] * x[1] + 2 * x[1] * x[2] * x[2] + 3 * x[0] * x[2] * x[2];
}

}  // namespace

TEST(TraceSpace, MassIsSymmetricPositiveAndIntegratesArea) {
  Fixture fx;
  const TraceSpace& ts = fx.spaces->trace;
  const Eigen::MatrixXd m(ts.mass());
  EXPECT_LT((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff(), 0.0);
  for (int k = 0; k < 3; ++k) {
    const TraceField e = ts.interpolate([k](const Vec3&) { return Vec3(Vec3::Unit(k)); });
    EXPECT_NEAR(ts.l2_norm(e) * ts.l2_norm(e), 24.0, 1e-12);
  }
}

TEST(TraceSpace, RieszAndDensityAreInverse) {
  Fixture fx;
  const TraceSpace& ts = fx.spaces->trace;
  const CotraceDensity phi{random_vector(ts.dim(), 3)};
  const TraceField r = ts.riesz(phi);
  EXPECT_LT((ts.to_density(r).action - phi.action).norm(), 1e-10 * phi.action.norm());
  EXPECT_NEAR(ts.dual_norm(phi), ts.l2_norm(r), 1e-10 * ts.dual_norm(phi));
}

TEST(TraceSpace, TraceAndLiftAreOneSidedInverses) {
  Fixture fx;
  const TraceSpace& ts = fx.spaces->trace;
  const TraceField psi{random_vector(ts.dim(), 5)};
  EXPECT_EQ(trace(ts, lift(ts, psi)).coeffs, psi.coeffs);
  const Eigen::VectorXd u = random_vector(fx.spaces->velocity.dim(), 6);
  EXPECT_EQ(trace(ts, u, Side::Plus).coeffs, trace(ts, u, Side::Minus).coeffs);
}

TEST(TraceSpace, NormalDensityOfPositionIsThreeVolumes) {
  Fixture fx;
  const TraceSpace& ts = fx.spaces->trace;
  const TraceField x = ts.interpolate([](const Vec3& y) { return y; });
  EXPECT_NEAR(ts.pairing(normal_density(ts), x), 3.0 * 8.0, 1e-12);
  // constants carry no flux
  const TraceField c = ts.interpolate([](const Vec3&) { return Vec3(1.0, -2.0, 0.5); });
  EXPECT_NEAR(ts.pairing(normal_density(ts), c), 0.0, 1e-12);
}

TEST(TraceSpace, NormalizedQuotientIsOrthogonalToRieszNu) {
  Fixture fx;
  const TraceSpace& ts = fx.spaces->trace;
  const CotraceDensity phi{random_vector(ts.dim(), 7)};
  const CotraceDensity rep = normalize_quotient(ts, phi).representative;
  const TraceField rnu = ts.riesz(normal_density(ts));
  EXPECT_NEAR(rep.action.dot(rnu.coeffs), 0.0, 1e-10 * phi.action.norm());
  const Eigen::VectorXd diff = rep.action - phi.action;
  const Eigen::VectorXd nu = normal_density(ts).action;
  EXPECT_LT((diff - nu * (diff.dot(nu) / nu.squaredNorm())).norm(), 1e-10 * phi.action.norm());
}

TEST(FaceBubbles, InterpolantCarriesExactCellDivergence) {
  Fixture fx;
  const Mesh& mesh = fx.mesh;
  const SparseMatrix b = assemble_divergence(fx.spaces->velocity, fx.spaces->pressure, CellSet::All);
  const Eigen::VectorXd bu = b * fx.spaces->velocity.interpolate(cubic);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    double exact = 0.0;
    for (const auto& q : tet_rule_degree5()) exact += q.weight * mesh.volume(c) * cubic_div(mesh.map_point(c, q.lambda));
    EXPECT_NEAR(-bu[c], exact, 1e-12) << "cell " << c;
  }
}

TEST(FaceBubbles, PlainP2MissesCubicFlux) {
  Fixture fx(4, 2, PressureSpace::Kind::P0, false);
  const SparseMatrix b = assemble_divergence(fx.spaces->velocity, fx.spaces->pressure, CellSet::All);
  const Eigen::VectorXd bu = b * fx.spaces->velocity.interpolate(cubic);
  double worst = 0.0;
  for (int c = 0; c < fx.mesh.num_cells(); ++c) {
    double exact = 0.0;
    for (const auto& q : tet_rule_degree5()) {
      exact += q.weight * fx.mesh.volume(c) * cubic_div(fx.mesh.map_point(c, q.lambda));
    }
    worst = std::max(worst, std::abs(bu[c] + exact));
  }
  EXPECT_GT(worst, 1e-6);
}

TEST(Forms, ViscousFormIsSymmetricWithRigidKernel) {
  Fixture fx;
  const ViscosityField mu = ViscosityField::parse("two-phase:0.5,2");
  const AssembledForms forms = assemble(mu, *fx.spaces);
  const Eigen::MatrixXd a(forms.A);
  EXPECT_LT((a - a.transpose()).cwiseAbs().maxCoeff(), 1e-12 * a.cwiseAbs().maxCoeff());
  const Eigen::VectorXd rigid = fx.spaces->velocity.interpolate(
      [](const Vec3& x) { return Vec3(Vec3(1.0, 2.0, -1.0) + Vec3(0.3, -0.2, 0.7).cross(x)); });
  EXPECT_LT((forms.A * rigid).norm(), 1e-12 * rigid.norm() * a.cwiseAbs().maxCoeff());
  const Eigen::VectorXd u = random_vector(a.rows(), 9);
  EXPECT_GT(u.dot(forms.A * u), 0.0);
  EXPECT_LT(((forms.A_plus + forms.A_minus) - forms.A).norm(), 1e-12 * a.norm());
  EXPECT_LT(((forms.B_plus + forms.B_minus) - forms.B).norm(), 1e-12 * Eigen::MatrixXd(forms.B).norm());
}

TEST(Forms, KornEnergyOfLinearField) {
  Fixture fx;
  const ViscosityField mu = ViscosityField::parse("two-phase:0.5,2");
  const AssembledForms forms = assemble(mu, *fx.spaces);
  Eigen::Matrix3d g;
  g << 1.0, 0.4, -0.2, 0.1, -0.5, 0.3, 0.6, 0.0, -0.5;
  const Eigen::VectorXd u = fx.spaces->velocity.interpolate([&g](const Vec3& x) { return Vec3(g * x); });
  const double e2 = strain(g).squaredNorm();
  // 2 * (0.5 * |Omega_+| + 2 * |Omega_-|) * |E|^2
  EXPECT_NEAR(u.dot(forms.A * u), 2.0 * (0.5 * 8.0 + 2.0 * 56.0) * e2, 1e-10);
  // -b(u, 1) = integral of div u = trace(g) |B_R|
  EXPECT_NEAR(-(forms.B * u).sum(), g.trace() * 64.0, 1e-10);
}

TEST(Forms, ConormalActsThroughTheDofLift) {
  Fixture fx;
  const AssembledForms forms = assemble(ViscosityField::constant(1.0), *fx.spaces);
  const TraceSpace& ts = fx.spaces->trace;
  const Eigen::VectorXd u = random_vector(fx.spaces->velocity.dim(), 10);
  const Eigen::VectorXd p = random_vector(fx.spaces->pressure.dim(), 11);
  const Eigen::VectorXd none;
  const TraceField psi{random_vector(ts.dim(), 12)};
  const Eigen::VectorXd v = lift(ts, psi);
  const double plus = v.dot(forms.A_plus * u) + v.dot(forms.B_plus.transpose() * p);
  const double minus = v.dot(forms.A_minus * u) + v.dot(forms.B_minus.transpose() * p);
  EXPECT_NEAR(ts.pairing(conormal(forms, ts, u, p, none, Side::Plus), psi), plus, 1e-10 * std::abs(plus));
  EXPECT_NEAR(ts.pairing(conormal(forms, ts, u, p, none, Side::Minus), psi), -minus, 1e-10 * std::abs(minus));
}

TEST(Forms, GammaStarIsTheTransposeOfTrace) {
  Fixture fx;
  const TraceSpace& ts = fx.spaces->trace;
  const CotraceDensity phi{random_vector(ts.dim(), 13)};
  const Eigen::VectorXd u = random_vector(fx.spaces->velocity.dim(), 14);
  EXPECT_NEAR(gamma_star(ts, phi).dot(u), ts.pairing(phi, trace(ts, u)), 1e-11 * u.norm() * phi.action.norm());
}

TEST(Forms, ErrorNormsVanishOnInterpolatedQuadratics) {
  Fixture fx;
  auto f = [](const Vec3& x) { return Vec3(x[0] * x[1], x[2] * x[2] - x[0], 1.0 + x[1]); };
  auto grad = [](const Vec3& x) {
    Matrix3 g;
    g << x[1], x[0], 0.0, -1.0, 0.0, 2 * x[2], 0.0, 1.0, 0.0;
    return g;
  };
  const Eigen::VectorXd u = fx.spaces->velocity.interpolate(f);
  EXPECT_LT(velocity_l2_error(fx.spaces->velocity, u, f, CellSet::All), 1e-12);
  EXPECT_LT(velocity_h1_seminorm_error(fx.spaces->velocity, u, grad, CellSet::Exterior), 1e-12);
}

TEST(Viscosity, RegistryParsesAndRejects) {
  const ViscosityField two = ViscosityField::parse("two-phase:0.5,2");
  EXPECT_EQ(two.kind(), ViscosityField::Kind::TwoPhase);
  EXPECT_DOUBLE_EQ(two.value(Vec3::Zero(), Region::Interior), 0.5);
  EXPECT_DOUBLE_EQ(two.value(Vec3(1.5, 0, 0), Region::Exterior), 2.0);
  EXPECT_DOUBLE_EQ(two.bound(), 2.0);
  EXPECT_TRUE(ViscosityField::parse("const:3").is_constant());
  EXPECT_THROW(ViscosityField::parse("const:-1"), ConfigError);
  EXPECT_THROW(ViscosityField::parse("two-phase:1"), ConfigError);
  EXPECT_THROW(ViscosityField::parse("lava:1"), ConfigError);
  const Mesh mesh = build_box_mesh({1.0, 2.0, 4});
  EXPECT_THROW(ViscosityField::parse("const:3", 2.0).cell_values(mesh), AssemblyError);
  EXPECT_NO_THROW(ViscosityField::parse("const:3", 3.0).cell_values(mesh));
}
