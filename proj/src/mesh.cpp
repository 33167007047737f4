#include "varstokes/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <Eigen/Dense>

#include "varstokes/errors.hpp"

namespace varstokes {

namespace {

constexpr double kGeomTol = 1e-12;

bool is_integer(double v) { return std::abs(v - std::round(v)) < 1e-9; }

std::uint64_t face_key(std::array<int, 3> v) {
  std::sort(v.begin(), v.end());
  return (static_cast<std::uint64_t>(v[0]) << 42) | (static_cast<std::uint64_t>(v[1]) << 21) |
         static_cast<std::uint64_t>(v[2]);
}

}  // namespace

void GeometrySpec::validate() const {
  std::ostringstream msg;
  if (!(a > 0.0) || !(R > a)) {
    msg << "geometry requires 0 < a < R (got a=" << a << ", R=" << R << ")";
    throw ConfigError(msg.str());
  }
  if (n < 2 || n % 2 != 0) {
    msg << "cells per axis n must be even and >= 2 (got n=" << n << ")";
    throw ConfigError(msg.str());
  }
  const double layers = n * (R - a) / (2.0 * R);
  if (!is_integer(layers) || std::round(layers) < 1) {
    msg << "a/R ratio is not grid aligned: a=" << a << ", R=" << R << ", n=" << n
        << " puts the interface at " << layers << " cells from the box face";
    throw ConfigError(msg.str());
  }
}

int GeometrySpec::layers_outside() const { return static_cast<int>(std::lround(n * (R - a) / (2.0 * R))); }

double Mesh::volume(int cell) const {
  const auto& c = cells[cell];
  const Vec3 e1 = vertices[c[1]] - vertices[c[0]];
  const Vec3 e2 = vertices[c[2]] - vertices[c[0]];
  const Vec3 e3 = vertices[c[3]] - vertices[c[0]];
  return e1.dot(e2.cross(e3)) / 6.0;
}

Vec3 Mesh::centroid(int cell) const {
  const auto& c = cells[cell];
  return 0.25 * (vertices[c[0]] + vertices[c[1]] + vertices[c[2]] + vertices[c[3]]);
}

Eigen::Matrix<double, 3, 4> Mesh::barycentric_gradients(int cell) const {
  const auto& c = cells[cell];
  Eigen::Matrix3d J;
  J.col(0) = vertices[c[1]] - vertices[c[0]];
  J.col(1) = vertices[c[2]] - vertices[c[0]];
  J.col(2) = vertices[c[3]] - vertices[c[0]];
  const Eigen::Matrix3d Jinv = J.inverse();
  Eigen::Matrix<double, 3, 4> g;
  // rows of J^{-1} are the gradients of lambda_1..lambda_3
  g.col(1) = Jinv.row(0).transpose();
  g.col(2) = Jinv.row(1).transpose();
  g.col(3) = Jinv.row(2).transpose();
  g.col(0) = -(g.col(1) + g.col(2) + g.col(3));
  return g;
}

std::array<double, 4> Mesh::barycentric(int cell, const Vec3& x) const {
  const auto& c = cells[cell];
  Eigen::Matrix3d J;
  J.col(0) = vertices[c[1]] - vertices[c[0]];
  J.col(1) = vertices[c[2]] - vertices[c[0]];
  J.col(2) = vertices[c[3]] - vertices[c[0]];
  const Vec3 l = J.partialPivLu().solve(x - vertices[c[0]]);
  return {1.0 - l.sum(), l[0], l[1], l[2]};
}

Vec3 Mesh::map_point(int cell, const std::array<double, 4>& lambda) const {
  const auto& c = cells[cell];
  return lambda[0] * vertices[c[0]] + lambda[1] * vertices[c[1]] + lambda[2] * vertices[c[2]] +
         lambda[3] * vertices[c[3]];
}

int Mesh::locate(const Vec3& x) const {
  const double R = spec.R;
  const double h = spec.h();
  if ((x.array().abs() > R + kGeomTol).any()) return -1;
  std::array<int, 3> idx{};
  for (int d = 0; d < 3; ++d) {
    idx[d] = std::clamp(static_cast<int>(std::floor((x[d] + R) / h)), 0, spec.n - 1);
  }
  const int cube = idx[0] + spec.n * (idx[1] + spec.n * idx[2]);
  int best = -1;
  double best_min = -1e300;
  for (int t = 0; t < 6; ++t) {
    const int cell = 6 * cube + t;
    const auto l = barycentric(cell, x);
    const double m = *std::min_element(l.begin(), l.end());
    if (m >= -1e-10) return cell;
    if (m > best_min) {
      best_min = m;
      best = cell;
    }
  }
  return best;
}

bool Mesh::on_outer_boundary(const Vec3& x) const {
  return (x.array().abs() - spec.R).abs().minCoeff() < kGeomTol;
}

bool Mesh::in_closed_omega_plus(const Vec3& x) const {
  return (x.array().abs() <= spec.a + kGeomTol).all();
}

bool Mesh::on_gamma(const Vec3& x) const {
  return in_closed_omega_plus(x) && (x.array().abs() - spec.a).abs().minCoeff() < kGeomTol;
}

std::vector<int> Mesh::outer_shell_cells() const {
  std::vector<int> shell;
  for (int c = 0; c < num_cells(); ++c) {
    for (int v : cells[c]) {
      if (on_outer_boundary(vertices[v])) {
        shell.push_back(c);
        break;
      }
    }
  }
  return shell;
}

Mesh build_box_mesh(const GeometrySpec& spec) {
  spec.validate();
  Mesh mesh;
  mesh.spec = spec;
  const int n = spec.n;
  mesh.vertices.reserve(static_cast<std::size_t>(n + 1) * (n + 1) * (n + 1));
  for (int k = 0; k <= n; ++k) {
    for (int j = 0; j <= n; ++j) {
      for (int i = 0; i <= n; ++i) {
        mesh.vertices.emplace_back(-spec.R + 2.0 * spec.R * i / n, -spec.R + 2.0 * spec.R * j / n,
                                   -spec.R + 2.0 * spec.R * k / n);
      }
    }
  }
  // snap the interface planes exactly onto +-a
  for (auto& v : mesh.vertices) {
    for (int d = 0; d < 3; ++d) {
      if (std::abs(std::abs(v[d]) - spec.a) < 1e-9) v[d] = std::copysign(spec.a, v[d]);
    }
  }

  constexpr std::array<std::array<int, 3>, 6> perms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  mesh.cells.reserve(static_cast<std::size_t>(6) * n * n * n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        for (const auto& p : perms) {
          std::array<int, 3> pos{i, j, k};
          std::array<int, 4> tet{};
          tet[0] = mesh.grid_index(pos[0], pos[1], pos[2]);
          for (int s = 0; s < 3; ++s) {
            ++pos[p[s]];
            tet[s + 1] = mesh.grid_index(pos[0], pos[1], pos[2]);
          }
          mesh.cells.push_back(tet);
          if (mesh.volume(mesh.num_cells() - 1) < 0) std::swap(mesh.cells.back()[2], mesh.cells.back()[3]);
        }
      }
    }
  }

  mesh.cell_region.resize(mesh.cells.size());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Vec3 x = mesh.centroid(c);
    mesh.cell_region[c] = (x.array().abs() < spec.a).all() ? Region::Interior : Region::Exterior;
  }

  // face adjacency
  constexpr std::array<std::array<int, 3>, 4> local_faces{{{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}}};
  struct Incidence {
    int cells[2] = {-1, -1};
    int opposite[2] = {-1, -1};
    std::array<int, 3> verts{};
  };
  std::unordered_map<std::uint64_t, Incidence> incidence;
  incidence.reserve(mesh.cells.size() * 3);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (int f = 0; f < 4; ++f) {
      const std::array<int, 3> v{mesh.cells[c][local_faces[f][0]], mesh.cells[c][local_faces[f][1]],
                                 mesh.cells[c][local_faces[f][2]]};
      auto& inc = incidence[face_key(v)];
      const int slot = inc.cells[0] < 0 ? 0 : 1;
      inc.cells[slot] = c;
      inc.opposite[slot] = mesh.cells[c][f];
      inc.verts = v;
    }
  }

  auto make_face = [&mesh](const std::array<int, 3>& v, int cell, int other, int opposite, FaceTag tag) {
    const Vec3& p0 = mesh.vertices[v[0]];
    Vec3 nrm = (mesh.vertices[v[1]] - p0).cross(mesh.vertices[v[2]] - p0);
    const double area = 0.5 * nrm.norm();
    nrm.normalize();
    if (nrm.dot(p0 - mesh.vertices[opposite]) < 0) nrm = -nrm;
    // structured faces are axis aligned; remove rounding noise
    for (int d = 0; d < 3; ++d) nrm[d] = std::round(nrm[d]);
    return BoundaryFace{v, tag, cell, other, nrm, area};
  };

  for (const auto& [key, inc] : incidence) {
    if (inc.cells[1] < 0) {
      mesh.faces.push_back(make_face(inc.verts, inc.cells[0], -1, inc.opposite[0], FaceTag::Outer));
      continue;
    }
    const Region r0 = mesh.cell_region[inc.cells[0]];
    const Region r1 = mesh.cell_region[inc.cells[1]];
    if (r0 == r1) continue;
    const int s = r0 == Region::Interior ? 0 : 1;
    mesh.faces.push_back(make_face(inc.verts, inc.cells[s], inc.cells[1 - s], inc.opposite[s], FaceTag::Gamma));
  }
  // deterministic order independent of hashing
  std::sort(mesh.faces.begin(), mesh.faces.end(), [](const BoundaryFace& l, const BoundaryFace& r) {
    if (l.tag != r.tag) return l.tag < r.tag;
    auto a = l.vertices;
    auto b = r.vertices;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a < b;
  });
  return mesh;
}

Eigen::VectorXd indicator_omega_plus(const Mesh& mesh) {
  Eigen::VectorXd chi(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) chi[c] = mesh.cell_region[c] == Region::Interior ? 1.0 : 0.0;
  return chi;
}

void write_mesh_txt(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open mesh output file " + path);
  out.precision(17);
  out << "# varstokes mesh: a R n / nvertices / x y z ... / ncells / v0 v1 v2 v3 region(0=interior,1=exterior)"
         " ... / nfaces / v0 v1 v2 tag(0=gamma,1=outer) nx ny nz\n";
  out << mesh.spec.a << ' ' << mesh.spec.R << ' ' << mesh.spec.n << '\n';
  out << mesh.num_vertices() << '\n';
  for (const auto& v : mesh.vertices) out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  out << mesh.num_cells() << '\n';
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& t = mesh.cells[c];
    out << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << ' ' << static_cast<int>(mesh.cell_region[c]) << '\n';
  }
  out << mesh.faces.size() << '\n';
  for (const auto& f : mesh.faces) {
    out << f.vertices[0] << ' ' << f.vertices[1] << ' ' << f.vertices[2] << ' ' << static_cast<int>(f.tag) << ' '
        << f.normal[0] << ' ' << f.normal[1] << ' ' << f.normal[2] << '\n';
  }
}

}  // namespace varstokes
