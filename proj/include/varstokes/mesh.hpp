#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace varstokes {

using Vec3 = Eigen::Vector3d;

enum class Region : std::uint8_t { Interior, Exterior };
enum class FaceTag : std::uint8_t { Gamma, Outer };

/// Omega_+ = (-a,a)^3 inside the truncation box B_R = (-R,R)^3, split into
/// n cubes per axis.
struct GeometrySpec {
  double a = 1.0;
  double R = 2.0;
  int n = 4;

  double h() const { return 2.0 * R / n; }
  /// Throws ConfigError unless 0 < a < R, n is even and the planes x_i = +-a
  /// are grid planes.
  void validate() const;
  /// Number of cells per axis between -R and -a.
  int layers_outside() const;
};

struct BoundaryFace {
  std::array<int, 3> vertices;
  FaceTag tag;
  /// For Gamma: the INTERIOR cell; for Outer: the only (EXTERIOR) cell.
  int cell;
  /// For Gamma: the EXTERIOR neighbour; -1 on the outer boundary.
  int other_cell;
  /// Unit normal; on Gamma it points from Omega_+ into Omega_-, on the outer
  /// boundary it points out of the box.
  Vec3 normal;
  double area;
};

/// Structured Kuhn tetrahedral mesh of the box. Immutable after construction.
class Mesh {
 public:
  GeometrySpec spec;
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> cells;
  std::vector<Region> cell_region;
  std::vector<BoundaryFace> faces;

  int num_cells() const { return static_cast<int>(cells.size()); }
  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int grid_index(int i, int j, int k) const { return i + (spec.n + 1) * (j + (spec.n + 1) * k); }

  double volume(int cell) const;
  Vec3 centroid(int cell) const;
  /// Columns are the gradients of the four barycentric coordinates.
  Eigen::Matrix<double, 3, 4> barycentric_gradients(int cell) const;
  std::array<double, 4> barycentric(int cell, const Vec3& x) const;
  Vec3 map_point(int cell, const std::array<double, 4>& lambda) const;

  /// Cell containing x (closed), or -1 outside the box.
  int locate(const Vec3& x) const;

  bool on_outer_boundary(const Vec3& x) const;
  bool on_gamma(const Vec3& x) const;
  bool in_closed_omega_plus(const Vec3& x) const;

  /// Cells with at least one vertex on the outer boundary.
  std::vector<int> outer_shell_cells() const;
};

Mesh build_box_mesh(const GeometrySpec& spec);

/// Piecewise-constant characteristic function of Omega_+ (one value per cell).
Eigen::VectorXd indicator_omega_plus(const Mesh& mesh);

/// Plain-text dump: header line, vertices, cells with region tag, boundary
/// faces with tag and normal.
void write_mesh_txt(const Mesh& mesh, const std::string& path);

}  // namespace varstokes
