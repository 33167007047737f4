#include <gtest/gtest.h>

#include "varstokes/dirichlet.hpp"
#include "varstokes/errors.hpp"
#include "varstokes/oracle.hpp"
#include "varstokes/probes.hpp"

using namespace varstokes;

namespace {

struct Problem {
  explicit Problem(const ViscosityField& mu, int n = 4)
      : g{1.0, 2.0, n}, mesh(build_box_mesh(g)), spaces(build_spaces(mesh)), solver(*spaces, mu) {}
  GeometrySpec g;
  Mesh mesh;
  std::unique_ptr<Spaces> spaces;
  ExteriorSolver solver;
};

const ViscosityField kTwoPhase = ViscosityField::parse("two-phase:0.5,2");

}  // namespace

TEST(Exterior, ZeroDataGivesZeroSolution) {
  Problem s(kTwoPhase);
  const ExteriorProblem p{Eigen::VectorXd::Zero(s.spaces->velocity.dim()),
                          TraceField{Eigen::VectorXd::Zero(s.spaces->trace.dim())}};
  EXPECT_EQ(s.solver.solve_variational(p).u.norm(), 0.0);
  EXPECT_EQ(s.solver.solve_potential(p).u.norm(), 0.0);
}

TEST(Exterior, MethodsAgreeOnCurlBump) {
  Problem s(kTwoPhase);
  const ManufacturedSolution m = manufactured("curl-bump", kTwoPhase, s.g);
  const ExteriorProblem p{assemble_load(s.spaces->velocity, m.f, CellSet::Exterior),
                          s.spaces->trace.interpolate(m.phi)};
  const ExteriorSolution var = s.solver.solve_variational(p);
  const ExteriorSolution pot = s.solver.solve_potential(p);
  EXPECT_LT(var.momentum_residual, 1e-10);
  EXPECT_LT(var.constraint_residual, 1e-10);
  EXPECT_LT(var.trace_error, 1e-12);
  EXPECT_LT(pot.trace_error, 1e-8);
  EXPECT_LT((var.u - pot.u).norm(), 1e-7 * var.u.norm());
  // extension by zero into Omega_+
  for (int i = 0; i < s.spaces->velocity.dim(); ++i) {
    if (s.spaces->velocity.dof_interior(i)) EXPECT_EQ(var.u[i], 0.0);
  }
  const auto probes = exterior_probes(s.g);
  ASSERT_EQ(probes.size(), 27u);
  std::vector<Vec3> exact;
  for (const auto& x : probes) exact.push_back(m.u(x));
  EXPECT_LT(probe_distance(evaluate_all(s.spaces->velocity, var.u, probes), exact), 0.5 * probe_norm(exact));
}

TEST(Exterior, FluxDataNeedsTheVariationalPath) {
  const ViscosityField one = ViscosityField::constant(1.0);
  Problem s(one);
  const ManufacturedSolution m = manufactured("radial", one, s.g);
  const ExteriorProblem p{Eigen::VectorXd::Zero(s.spaces->velocity.dim()), s.spaces->trace.interpolate(m.phi)};
  EXPECT_THROW(s.solver.solve_potential(p), PreconditionError);
  const ExteriorSolution var = s.solver.solve_variational(p);
  EXPECT_LT(var.constraint_residual, 1e-10);
  // the radial field matches the outer datum, so truncation adds no error
  const Vec3 x(1.5, 0.0, 0.0);
  EXPECT_LT((evaluate_velocity(s.spaces->velocity, var.u, x) - m.u(x)).norm(), 0.2 * m.u(x).norm());
}

TEST(Exterior, LiftingIsDiscretelyDivergenceFree) {
  Problem s(kTwoPhase);
  const TraceField phi = project_nu_orthogonal(
      s.spaces->trace, s.spaces->trace.interpolate([](const Vec3& y) { return Vec3(y[1], y[2] * y[0], -y[0]); }));
  const Eigen::VectorXd w = s.solver.build_lifting(phi);
  EXPECT_LT((trace(s.spaces->trace, w).coeffs - phi.coeffs).norm(), 1e-12);
  EXPECT_LT((s.solver.forms().B_minus * w).norm(), 1e-10 * w.norm());
}

TEST(Probes, LayoutAndDistances) {
  const GeometrySpec g{1.0, 2.0, 8};
  const auto ext = exterior_probes(g);
  const auto in = interior_probes(g);
  EXPECT_EQ(in.size(), 27u);
  for (const auto& x : ext) EXPECT_GE(distance_to_gamma(x, g.a), g.h() - 1e-12);
  for (const auto& x : in) EXPECT_LE(x.cwiseAbs().maxCoeff(), 0.5);
  EXPECT_DOUBLE_EQ(probe_norm({Vec3(3, 4, 0)}), 5.0);
  EXPECT_DOUBLE_EQ(probe_distance({Vec3(1, 1, 1)}, {Vec3(1, 1, 0)}), 1.0);
}
