#pragma once

#include <vector>

#include "varstokes/fespace.hpp"

namespace varstokes {

/// Discrete velocity at x (containing cell found on the structured grid).
Vec3 evaluate_velocity(const VelocitySpace& velocity, const Eigen::VectorXd& u, const Vec3& x);

/// 27 points in Omega_-: {-s,0,s}^3 without the centre, s = 1.5a, plus
/// (s, s/2, -s/2). Requires R >= 2a so that every point keeps distance
/// >= h from Gamma and from the outer boundary at the default resolutions.
std::vector<Vec3> exterior_probes(const GeometrySpec& geometry);
/// 27 points {-a/2, 0, a/2}^3 inside Omega_+.
std::vector<Vec3> interior_probes(const GeometrySpec& geometry);

/// sqrt(sum |u_i - v_i|^2).
double probe_distance(const std::vector<Vec3>& u, const std::vector<Vec3>& v);
/// sqrt(sum |u_i|^2).
double probe_norm(const std::vector<Vec3>& u);

std::vector<Vec3> evaluate_all(const VelocitySpace& velocity, const Eigen::VectorXd& u, const std::vector<Vec3>& points);

}  // namespace varstokes
