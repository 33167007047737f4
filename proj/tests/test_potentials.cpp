#include <random>

#include <gtest/gtest.h>

#include "varstokes/errors.hpp"
#include "varstokes/potentials.hpp"

using namespace varstokes;

namespace {

// One n=4 two-phase operator shared by the suite.
class Potentials : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    mesh_ = new Mesh(build_box_mesh({1.0, 2.0, 4}));
    spaces_ = build_spaces(*mesh_).release();
    w_ = new WholeSpaceStokes(*spaces_, ViscosityField::parse("two-phase:0.5,2"));
  }
  static void TearDownTestSuite() {
    delete w_;
    delete spaces_;
    delete mesh_;
  }
  static CotraceDensity random_density(unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    CotraceDensity phi{Eigen::VectorXd(ts().dim())};
    for (int i = 0; i < ts().dim(); ++i) phi.action[i] = normal(rng);
    return phi;
  }
  static const TraceSpace& ts() { return spaces_->trace; }

  static Mesh* mesh_;
  static Spaces* spaces_;
  static WholeSpaceStokes* w_;
};

Mesh* Potentials::mesh_ = nullptr;
Spaces* Potentials::spaces_ = nullptr;
WholeSpaceStokes* Potentials::w_ = nullptr;

}  // namespace

TEST_F(Potentials, NormalDensityIsInTheKernel) {
  const PotentialPair pair = w_->single_layer(normal_density(ts()));
  EXPECT_LT(h1_norm(spaces_->velocity, pair.u, CellSet::All), 1e-10);
  const Eigen::VectorXd chi = indicator_omega_plus(*mesh_);
  EXPECT_LT(l2_norm(spaces_->pressure, Eigen::VectorXd(pair.p + chi), CellSet::All), 1e-10);
}

TEST_F(Potentials, NewtonianOfZeroIsZeroAndLinear) {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(spaces_->velocity.dim());
  EXPECT_EQ(w_->newtonian(zero).u.norm(), 0.0);
  const Eigen::VectorXd l1 = gamma_star(ts(), random_density(1));
  const Eigen::VectorXd l2 = gamma_star(ts(), random_density(2));
  const Eigen::VectorXd sum = w_->newtonian(Eigen::VectorXd(l1 + 2.0 * l2)).u;
  const Eigen::VectorXd parts = w_->newtonian(l1).u + 2.0 * w_->newtonian(l2).u;
  EXPECT_LT((sum - parts).norm(), 1e-10 * sum.norm());
}

TEST_F(Potentials, JumpRelations) {
  for (unsigned s = 0; s < 3; ++s) {
    const JumpReport r = w_->jump_check(random_density(10 + s));
    EXPECT_EQ(r.trace_jump, 0.0);
    EXPECT_LT(r.conormal_residual, 1e-9);
  }
}

TEST_F(Potentials, EnergyAndRange) {
  const Eigen::VectorXd nu = normal_density(ts()).action;
  for (unsigned s = 0; s < 3; ++s) {
    const CotraceDensity phi = random_density(20 + s);
    const PotentialPair pair = w_->single_layer(phi);
    const TraceField v = trace(ts(), pair.u);
    const double energy = w_->energy(pair.u);
    EXPECT_NEAR(ts().pairing(phi, v), energy, 1e-10 * energy);
    EXPECT_LT(std::abs(nu.dot(v.coeffs)), 1e-11 * nu.norm() * phi.action.norm());
  }
}

TEST_F(Potentials, BoundaryOperatorIsSymmetricSemidefinite) {
  const VSpectrum s = w_->spectrum();
  EXPECT_LT(s.symmetry_defect, 1e-10);
  EXPECT_GT(s.min_raw_eigenvalue, -1e-10);
  EXPECT_LT(s.values[0], 1e-8);
  EXPECT_GT(s.values[1], 1e-3);
  EXPECT_GT(s.kernel_cosine, 0.999);
  const Eigen::MatrixXd& g = w_->galerkin_matrix();
  const CotraceDensity phi = random_density(30);
  EXPECT_LT((g * phi.action - w_->boundary_V(phi).coeffs).norm(), 1e-9 * (g * phi.action).norm());
}

TEST_F(Potentials, InverseBoundaryOperatorRecoversTheClass) {
  const CotraceDensity phi = normalize_quotient(ts(), random_density(40)).representative;
  const TraceField psi = w_->boundary_V(phi);
  const CotraceDensity back = w_->invert_boundary_V(psi).representative;
  EXPECT_LT(ts().dual_norm(Eigen::VectorXd(back.action - phi.action)), 1e-7 * ts().dual_norm(phi));
}

TEST_F(Potentials, InverseRejectsFluxData) {
  const TraceField x = ts().interpolate([](const Vec3& y) { return y; });
  EXPECT_THROW(w_->invert_boundary_V(x), PreconditionError);
  const TraceField projected = project_nu_orthogonal(ts(), x);
  EXPECT_LT(std::abs(ts().pairing(normal_density(ts()), projected)), 1e-12 * ts().l2_norm(x));
}

TEST_F(Potentials, OneSidedConormalsAverageToKStar) {
  const CotraceDensity phi = random_density(50);
  const auto [tp, tm] = w_->conormals(w_->single_layer(phi));
  const CotraceDensity k = w_->k_star(phi);
  EXPECT_LT(ts().dual_norm(Eigen::VectorXd(tp.action - 0.5 * phi.action - k.action)), 1e-9);
  EXPECT_LT(ts().dual_norm(Eigen::VectorXd(tm.action + 0.5 * phi.action - k.action)), 1e-9);
}

TEST_F(Potentials, GreenIdentityOnTheInnerCube) {
  // <t+, gamma v> = a_+(u,v) + b_+(v,p) for every v supported in the closed inner cube
  const CotraceDensity phi = random_density(60);
  const PotentialPair pair = w_->single_layer(phi);
  const auto [tp, tm] = w_->conormals(pair);
  std::mt19937_64 rng(61);
  std::normal_distribution<double> normal;
  const VelocitySpace& vs = spaces_->velocity;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(vs.dim());
  for (int i = 0; i < vs.dim(); ++i) {
    if (vs.dof_interior(i) || vs.dof_on_gamma(i)) v[i] = normal(rng);
  }
  const AssembledForms& f = w_->forms();
  const double rhs = v.dot(f.A_plus * pair.u) + v.dot(f.B_plus.transpose() * pair.p);
  EXPECT_NEAR(ts().pairing(tp, trace(ts(), v)), rhs, 1e-9 * std::abs(rhs));
}
