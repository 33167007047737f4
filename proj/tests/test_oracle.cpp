#include <cmath>

#include <gtest/gtest.h>

#include "varstokes/errors.hpp"
#include "varstokes/oracle.hpp"

using namespace varstokes;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Outward normal of the cube (-a,a)^3 at a point on a face interior.
Vec3 cube_normal(const Vec3& y) {
  Eigen::Index k;
  y.cwiseAbs().maxCoeff(&k);
  Vec3 n = Vec3::Zero();
  n[k] = y[k] > 0 ? 1.0 : -1.0;
  return n;
}

Matrix3 fd_gradient(const VectorFunction& f, const Vec3& x, double h = 1e-5) {
  Matrix3 g;
  for (int k = 0; k < 3; ++k) {
    const Vec3 e = h * Vec3::Unit(k);
    g.col(k) = (f(x + e) - f(x - e)) / (2 * h);
  }
  return g;
}

Vec3 fd_laplacian(const VectorFunction& f, const Vec3& x, double h = 1e-3) {
  Vec3 s = -6.0 * f(x);
  for (int k = 0; k < 3; ++k) s += f(x + h * Vec3::Unit(k)) + f(x - h * Vec3::Unit(k));
  return s / (h * h);
}

}  // namespace

TEST(Stokeslet, SymmetricAndDivergenceFree) {
  const Vec3 y(0.1, -0.2, 0.3), x(1.5, 0.7, -1.1), force(0.4, -1.0, 2.0);
  const Matrix3 g = stokeslet(x, y, 2.0);
  EXPECT_LT((g - g.transpose()).norm(), 1e-16);
  const Matrix3 grad = stokeslet_gradient(x, y, 2.0, force);
  EXPECT_NEAR(grad.trace(), 0.0, 1e-15);
  const Matrix3 fd = fd_gradient([&](const Vec3& z) { return Vec3(stokeslet(z, y, 2.0) * force); }, x);
  EXPECT_LT((grad - fd).norm(), 1e-8);
}

TEST(Stokeslet, SolvesStokesAwayFromTheSource) {
  const double mu = 0.5;
  const Vec3 y = Vec3::Zero(), x(0.9, -0.4, 0.6), force(1.0, 2.0, -0.5);
  const Vec3 lap = fd_laplacian([&](const Vec3& z) { return Vec3(stokeslet(z, y, mu) * force); }, x);
  Vec3 grad_p;
  const double h = 1e-5;
  for (int k = 0; k < 3; ++k) {
    grad_p[k] = (pressurelet(x + h * Vec3::Unit(k), y).dot(force) - pressurelet(x - h * Vec3::Unit(k), y).dot(force)) /
                (2 * h);
  }
  EXPECT_LT((mu * lap - grad_p).norm(), 1e-5);
}

TEST(Stokeslet, ExplicitValue) {
  const Matrix3 g = stokeslet(Vec3(2, 0, 0), Vec3::Zero(), 1.0);
  EXPECT_NEAR(g(0, 0), 2.0 / (2.0 * 8 * kPi), 1e-15);
  EXPECT_NEAR(g(1, 1), 1.0 / (2.0 * 8 * kPi), 1e-15);
  EXPECT_NEAR(g(0, 1), 0.0, 1e-15);
}

TEST(ClassicalSingleLayer, NormalDensityGivesZeroVelocityInside) {
  const Mesh mesh = build_box_mesh({1.0, 2.0, 4});
  const Vec3 v = classical_single_layer(mesh, cube_normal, Vec3(0.2, -0.1, 0.3), 1.0, 3, 0.1);
  EXPECT_LT(v.norm(), 1e-4);
}

TEST(ClassicalSingleLayer, SelfConvergesUnderRefinement) {
  const Mesh mesh = build_box_mesh({1.0, 2.0, 4});
  auto density = [](const Vec3& y) { return Vec3(y[1] * y[2], 1.0 + y[0], y[0] * y[1] * y[2]); };
  const Vec3 x(0.4, 0.3, -0.45);
  const Vec3 v1 = classical_single_layer(mesh, density, x, 1.0, 1, 0.1);
  const Vec3 v2 = classical_single_layer(mesh, density, x, 1.0, 2, 0.1);
  const Vec3 v3 = classical_single_layer(mesh, density, x, 1.0, 3, 0.1);
  EXPECT_LT((v3 - v2).norm(), 0.25 * (v2 - v1).norm());
  EXPECT_THROW(classical_single_layer(mesh, density, Vec3(0.95, 0, 0), 1.0, 1, 0.1), PreconditionError);
}

TEST(Bump, DerivativesMatchFiniteDifferences) {
  const Bump1D b(1.0, 2.0, 3);
  EXPECT_EQ(b(0.5), 0.0);
  EXPECT_EQ(b(2.5, 1), 0.0);
  EXPECT_NEAR(b(1.5), 1.0, 1e-15);
  const double h = 1e-6;
  for (double t : {1.1, 1.37, 1.8}) {
    for (int d = 0; d < 3; ++d) EXPECT_NEAR((b(t + h, d) - b(t - h, d)) / (2 * h), b(t, d + 1), 1e-5);
  }
}

TEST(Manufactured, CurlBumpSolvesTheExteriorProblem) {
  const GeometrySpec g{1.0, 2.0, 4};
  const ManufacturedSolution m = manufactured("curl-bump", ViscosityField::parse("two-phase:0.5,2"), g);
  EXPECT_TRUE(m.flux_free);
  EXPECT_TRUE(m.vanishes_on_outer);
  for (const Vec3& x : {Vec3(1.3, 0.2, -0.4), Vec3(1.7, -0.9, 0.5), Vec3(1.45, 0.3, 0.7)}) {
    const Matrix3 grad = m.grad_u(x);
    EXPECT_NEAR(grad.trace(), 0.0, 1e-12);
    EXPECT_LT((grad - fd_gradient(m.u, x)).norm(), 1e-6 * (1.0 + grad.norm()));
    Vec3 grad_p;
    for (int k = 0; k < 3; ++k) grad_p[k] = (m.p(x + 1e-5 * Vec3::Unit(k)) - m.p(x - 1e-5 * Vec3::Unit(k))) / 2e-5;
    EXPECT_LT((2.0 * fd_laplacian(m.u, x) - grad_p - m.f(x)).norm(), 1e-4 * (1.0 + m.f(x).norm()));
  }
  EXPECT_EQ(m.u(Vec3(0.0, 0.0, 0.0)).norm(), 0.0);
  EXPECT_EQ(m.u(Vec3(2.0, 0.5, 0.5)).norm(), 0.0);
  EXPECT_EQ(m.u(Vec3(1.5, 2.0, 0.5)).norm(), 0.0);
}

TEST(Manufactured, RegistryRestrictions) {
  const GeometrySpec g{1.0, 2.0, 4};
  EXPECT_THROW(manufactured("stokeslet-in", ViscosityField::parse("two-phase:0.5,2"), g), ConfigError);
  EXPECT_THROW(manufactured("radial", ViscosityField::parse("two-phase:0.5,2"), g), ConfigError);
  EXPECT_THROW(manufactured("vortex", ViscosityField::constant(1.0), g), ConfigError);
  const ManufacturedSolution s = manufactured("stokeslet-in", ViscosityField::constant(1.0), g);
  EXPECT_TRUE(s.force_free);
  EXPECT_FALSE(s.vanishes_on_outer);
  const ManufacturedSolution r = manufactured("radial", ViscosityField::constant(1.0), g);
  EXPECT_FALSE(r.flux_free);
  EXPECT_EQ(manufactured("zero", ViscosityField::constant(1.0), g).u(Vec3(1.5, 0, 0)).norm(), 0.0);
}
