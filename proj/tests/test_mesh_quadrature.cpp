#include <cmath>

#include <gtest/gtest.h>

#include "varstokes/errors.hpp"
#include "varstokes/mesh.hpp"
#include "varstokes/quadrature.hpp"

using namespace varstokes;

namespace {

double factorial(int k) { return std::tgamma(k + 1.0); }

// Mean of x^a y^b over the reference triangle: 2 a! b! / (a+b+2)!.
double triangle_mean(int a, int b) { return 2.0 * factorial(a) * factorial(b) / factorial(a + b + 2); }

// Mean of x^a y^b z^c over the reference tetrahedron: 6 a! b! c! / (a+b+c+3)!.
double tet_mean(int a, int b, int c) {
  return 6.0 * factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3);
}

void expect_triangle_exact(const TriRule& rule, int degree) {
  for (int a = 0; a <= degree; ++a) {
    for (int b = 0; a + b <= degree; ++b) {
      double sum = 0.0;
      for (const auto& q : rule) sum += q.weight * std::pow(q.lambda[1], a) * std::pow(q.lambda[2], b);
      EXPECT_NEAR(sum, triangle_mean(a, b), 1e-14) << "x^" << a << " y^" << b;
    }
  }
}

}  // namespace

TEST(Quadrature, TriangleDegreeFiveIsExact) { expect_triangle_exact(tri_rule_degree5(), 5); }

TEST(Quadrature, TriangleDegreeEightIsExact) { expect_triangle_exact(tri_rule_degree8(), 8); }

TEST(Quadrature, TriangleDegreeFiveMissesDegreeSix) {
  double sum = 0.0;
  for (const auto& q : tri_rule_degree5()) sum += q.weight * std::pow(q.lambda[1], 6);
  EXPECT_GT(std::abs(sum - triangle_mean(6, 0)), 1e-8);
}

TEST(Quadrature, TetDegreeFiveIsExactWithPositiveWeights) {
  const TetRule& rule = tet_rule_degree5();
  EXPECT_EQ(rule.size(), 14u);
  for (const auto& q : rule) {
    EXPECT_GT(q.weight, 0.0);
    EXPECT_NEAR(q.lambda[0] + q.lambda[1] + q.lambda[2] + q.lambda[3], 1.0, 1e-15);
  }
  for (int a = 0; a <= 5; ++a) {
    for (int b = 0; a + b <= 5; ++b) {
      for (int c = 0; a + b + c <= 5; ++c) {
        double sum = 0.0;
        for (const auto& q : rule) {
          sum += q.weight * std::pow(q.lambda[1], a) * std::pow(q.lambda[2], b) * std::pow(q.lambda[3], c);
        }
        EXPECT_NEAR(sum, tet_mean(a, b, c), 1e-14) << a << b << c;
      }
    }
  }
}

TEST(Mesh, CountsAndVolumes) {
  const Mesh mesh = build_box_mesh({1.0, 2.0, 4});
  EXPECT_EQ(mesh.num_vertices(), 125);
  EXPECT_EQ(mesh.num_cells(), 6 * 64);
  double total = 0.0, inner = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    EXPECT_GT(mesh.volume(c), 0.0);
    total += mesh.volume(c);
    if (mesh.cell_region[c] == Region::Interior) inner += mesh.volume(c);
  }
  EXPECT_NEAR(total, 64.0, 1e-12);
  EXPECT_NEAR(inner, 8.0, 1e-12);
  EXPECT_NEAR(indicator_omega_plus(mesh).sum(), 6 * 8, 0.0);
}

TEST(Mesh, RegionTagsFollowCentroids) {
  const Mesh mesh = build_box_mesh({1.0, 3.0, 6});
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const bool inside = mesh.centroid(c).cwiseAbs().maxCoeff() < 1.0;
    EXPECT_EQ(mesh.cell_region[c] == Region::Interior, inside);
  }
}

TEST(Mesh, BoundaryFacesAreOrientedAndComplete) {
  const double a = 1.0, R = 2.0;
  const Mesh mesh = build_box_mesh({a, R, 8});
  double gamma_area = 0.0, outer_area = 0.0;
  Vec3 gamma_flux = Vec3::Zero();
  for (const auto& f : mesh.faces) {
    const Vec3 mid = (mesh.vertices[f.vertices[0]] + mesh.vertices[f.vertices[1]] + mesh.vertices[f.vertices[2]]) / 3.0;
    EXPECT_GT(f.normal.dot(mid), 0.0);
    EXPECT_NEAR(f.normal.norm(), 1.0, 1e-15);
    if (f.tag == FaceTag::Gamma) {
      gamma_area += f.area;
      gamma_flux += f.area * f.normal;
      EXPECT_EQ(mesh.cell_region[f.cell], Region::Interior);
      ASSERT_GE(f.other_cell, 0);
      EXPECT_EQ(mesh.cell_region[f.other_cell], Region::Exterior);
    } else {
      outer_area += f.area;
      EXPECT_EQ(f.other_cell, -1);
    }
  }
  EXPECT_NEAR(gamma_area, 24.0 * a * a, 1e-12);
  EXPECT_NEAR(outer_area, 24.0 * R * R, 1e-12);
  EXPECT_LT(gamma_flux.norm(), 1e-12);
}

TEST(Mesh, LocateAndBarycentricRoundTrip) {
  const Mesh mesh = build_box_mesh({1.0, 2.0, 4});
  const Vec3 x(0.3, -1.7, 1.1);
  const int c = mesh.locate(x);
  ASSERT_GE(c, 0);
  const auto lambda = mesh.barycentric(c, x);
  for (double l : lambda) EXPECT_GE(l, -1e-14);
  EXPECT_LT((mesh.map_point(c, lambda) - x).norm(), 1e-14);
  EXPECT_EQ(mesh.locate(Vec3(2.5, 0, 0)), -1);
}

TEST(Mesh, RejectsBadGeometry) {
  EXPECT_THROW(build_box_mesh({1.0, 2.0, 5}), ConfigError);
  EXPECT_THROW(build_box_mesh({2.0, 2.0, 4}), ConfigError);
  EXPECT_THROW(build_box_mesh({0.7, 2.0, 4}), ConfigError);
}
