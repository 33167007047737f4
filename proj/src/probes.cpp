#include "varstokes/probes.hpp"

#include "varstokes/errors.hpp"

namespace varstokes {

Vec3 evaluate_velocity(const VelocitySpace& velocity, const Eigen::VectorXd& u, const Vec3& x) {
  const Mesh& mesh = velocity.mesh();
  const int cell = mesh.locate(x);
  if (cell < 0) throw PreconditionError("probe point outside the box");
  const auto values = velocity.local_values(cell, mesh.barycentric(cell, x));
  const std::vector<int> dofs = velocity.cell_dofs(cell);
  Vec3 v = Vec3::Zero();
  for (std::size_t a = 0; a < dofs.size(); ++a) v += values.col(static_cast<int>(a)) * u[dofs[a]];
  return v;
}

std::vector<Vec3> exterior_probes(const GeometrySpec& geometry) {
  const double s = 1.5 * geometry.a;
  std::vector<Vec3> pts;
  for (int k = -1; k <= 1; ++k) {
    for (int j = -1; j <= 1; ++j) {
      for (int i = -1; i <= 1; ++i) {
        if (i == 0 && j == 0 && k == 0) continue;
        pts.emplace_back(i * s, j * s, k * s);
      }
    }
  }
  pts.emplace_back(s, 0.5 * s, -0.5 * s);
  return pts;
}

std::vector<Vec3> interior_probes(const GeometrySpec& geometry) {
  const double s = 0.5 * geometry.a;
  std::vector<Vec3> pts;
  for (int k = -1; k <= 1; ++k) {
    for (int j = -1; j <= 1; ++j) {
      for (int i = -1; i <= 1; ++i) pts.emplace_back(i * s, j * s, k * s);
    }
  }
  return pts;
}

double probe_distance(const std::vector<Vec3>& u, const std::vector<Vec3>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += (u[i] - v[i]).squaredNorm();
  return std::sqrt(s);
}

double probe_norm(const std::vector<Vec3>& u) {
  double s = 0.0;
  for (const auto& x : u) s += x.squaredNorm();
  return std::sqrt(s);
}

std::vector<Vec3> evaluate_all(const VelocitySpace& velocity, const Eigen::VectorXd& u,
                               const std::vector<Vec3>& points) {
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const auto& x : points) out.push_back(evaluate_velocity(velocity, u, x));
  return out;
}

}  // namespace varstokes
