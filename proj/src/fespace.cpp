#include "varstokes/fespace.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Geometry>

#include "varstokes/errors.hpp"
#include "varstokes/quadrature.hpp"

namespace varstokes {

namespace {

constexpr std::array<std::array<int, 2>, 6> kTetEdges{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
constexpr std::array<std::array<int, 2>, 3> kTriEdges{{{0, 1}, {0, 2}, {1, 2}}};

std::uint64_t face_key(const std::array<int, 3>& v) {
  return (static_cast<std::uint64_t>(v[0]) << 42) | (static_cast<std::uint64_t>(v[1]) << 21) |
         static_cast<std::uint64_t>(v[2]);
}

}  // namespace

VelocitySpace::VelocitySpace(const Mesh& mesh, int degree, bool face_bubbles)
    : mesh_(&mesh), degree_(degree), bubbles_(face_bubbles) {
  if (degree != 1 && degree != 2) throw ConfigError("velocity degree must be 1 or 2");
  const int n = mesh.spec.n;
  const int s = degree;  // lattice refinement
  fine_ = s * n + 1;
  const double R = mesh.spec.R;
  const double a = mesh.spec.a;
  nodes_.reserve(static_cast<std::size_t>(fine_) * fine_ * fine_);
  for (int k = 0; k < fine_; ++k) {
    for (int j = 0; j < fine_; ++j) {
      for (int i = 0; i < fine_; ++i) {
        Vec3 x(-R + 2.0 * R * i / (fine_ - 1), -R + 2.0 * R * j / (fine_ - 1), -R + 2.0 * R * k / (fine_ - 1));
        for (int d = 0; d < 3; ++d) {
          if (std::abs(std::abs(x[d]) - a) < 1e-9) x[d] = std::copysign(a, x[d]);
        }
        nodes_.push_back(x);
      }
    }
  }
  const int nv = n + 1;
  auto lattice = [&](int vertex) {
    return std::array<int, 3>{s * (vertex % nv), s * ((vertex / nv) % nv), s * (vertex / (nv * nv))};
  };
  auto lattice_index = [&](const std::array<int, 3>& p) { return p[0] + fine_ * (p[1] + fine_ * p[2]); };

  cell_nodes_.resize(static_cast<std::size_t>(mesh.num_cells()) * nodes_per_cell());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    int* out = cell_nodes_.data() + static_cast<std::size_t>(c) * nodes_per_cell();
    std::array<std::array<int, 3>, 4> p{};
    for (int v = 0; v < 4; ++v) {
      p[v] = lattice(mesh.cells[c][v]);
      out[v] = lattice_index(p[v]);
    }
    if (degree_ == 2) {
      for (int e = 0; e < 6; ++e) {
        const auto& q0 = p[kTetEdges[e][0]];
        const auto& q1 = p[kTetEdges[e][1]];
        out[4 + e] = lattice_index({(q0[0] + q1[0]) / 2, (q0[1] + q1[1]) / 2, (q0[2] + q1[2]) / 2});
      }
    }
  }

  outer_.resize(nodes_.size());
  gamma_.resize(nodes_.size());
  interior_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    outer_[i] = mesh.on_outer_boundary(nodes_[i]);
    gamma_[i] = mesh.on_gamma(nodes_[i]);
    interior_[i] = mesh.in_closed_omega_plus(nodes_[i]) && !gamma_[i];
  }

  cell_faces_.resize(4 * static_cast<std::size_t>(mesh.num_cells()));
  face_lookup_.reserve(3 * static_cast<std::size_t>(mesh.num_cells()));
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (int i = 0; i < 4; ++i) {
      std::array<int, 3> v{};
      for (int j = 0, m = 0; j < 4; ++j) {
        if (j != i) v[m++] = mesh.cells[c][j];
      }
      std::sort(v.begin(), v.end());
      const auto [it, added] = face_lookup_.try_emplace(face_key(v), num_faces());
      if (added) face_vertices_.push_back(v);
      cell_faces_[4 * static_cast<std::size_t>(c) + i] = it->second;
    }
  }
  const int nf = num_faces();
  face_normals_.resize(nf);
  face_outer_.resize(nf);
  face_gamma_.resize(nf);
  face_interior_.resize(nf);
  for (int f = 0; f < nf; ++f) {
    const auto& v = face_vertices_[f];
    const Vec3& p0 = mesh.vertices[v[0]];
    const Vec3 centroid = (p0 + mesh.vertices[v[1]] + mesh.vertices[v[2]]) / 3.0;
    Vec3 normal = (mesh.vertices[v[1]] - p0).cross(mesh.vertices[v[2]] - p0).normalized();
    face_outer_[f] = mesh.on_outer_boundary(centroid);
    face_gamma_[f] = mesh.on_gamma(centroid);
    face_interior_[f] = mesh.in_closed_omega_plus(centroid) && !face_gamma_[f];
    // Gamma faces of the cube are axis aligned, so nu . centroid = a > 0
    if (face_gamma_[f] && normal.dot(centroid) < 0.0) normal = -normal;
    face_normals_[f] = normal;
  }
}

int VelocitySpace::face_id(const std::array<int, 3>& vertices) const {
  std::array<int, 3> v = vertices;
  std::sort(v.begin(), v.end());
  const auto it = face_lookup_.find(face_key(v));
  return it == face_lookup_.end() ? -1 : it->second;
}

std::vector<int> VelocitySpace::cell_dofs(int cell) const {
  std::vector<int> dofs;
  dofs.reserve(local_dim());
  for (int node : cell_nodes(cell)) {
    for (int c = 0; c < 3; ++c) dofs.push_back(3 * node + c);
  }
  if (bubbles_) {
    for (int i = 0; i < 4; ++i) dofs.push_back(bubble_dof(cell_face(cell, i)));
  }
  return dofs;
}

int VelocitySpace::node_at(const Vec3& x) const {
  const double R = mesh_->spec.R;
  std::array<int, 3> idx{};
  for (int d = 0; d < 3; ++d) {
    const double t = (x[d] + R) / (2.0 * R) * (fine_ - 1);
    idx[d] = static_cast<int>(std::lround(t));
    if (std::abs(t - idx[d]) > 1e-8 || idx[d] < 0 || idx[d] >= fine_) return -1;
  }
  return idx[0] + fine_ * (idx[1] + fine_ * idx[2]);
}

bool VelocitySpace::dof_on_outer(int dof) const {
  return dof < 3 * num_nodes() ? outer_[dof / 3] : face_outer_[dof - 3 * num_nodes()];
}

bool VelocitySpace::dof_on_gamma(int dof) const {
  return dof < 3 * num_nodes() ? gamma_[dof / 3] : face_gamma_[dof - 3 * num_nodes()];
}

bool VelocitySpace::dof_interior(int dof) const {
  return dof < 3 * num_nodes() ? interior_[dof / 3] : face_interior_[dof - 3 * num_nodes()];
}

std::vector<int> VelocitySpace::constrained_dofs() const {
  std::vector<int> dofs;
  for (int d = 0; d < dim(); ++d) {
    if (dof_on_outer(d)) dofs.push_back(d);
  }
  return dofs;
}

std::vector<int> VelocitySpace::free_dofs(Domain domain) const {
  std::vector<int> dofs;
  for (int d = 0; d < dim(); ++d) {
    if (dof_on_outer(d)) continue;
    if (domain == Domain::Exterior && (dof_on_gamma(d) || dof_interior(d))) continue;
    dofs.push_back(d);
  }
  return dofs;
}

void VelocitySpace::shape_values(const std::array<double, 4>& l, double* out) const {
  if (degree_ == 1) {
    for (int i = 0; i < 4; ++i) out[i] = l[i];
    return;
  }
  for (int i = 0; i < 4; ++i) out[i] = l[i] * (2.0 * l[i] - 1.0);
  for (int e = 0; e < 6; ++e) out[4 + e] = 4.0 * l[kTetEdges[e][0]] * l[kTetEdges[e][1]];
}

Eigen::Matrix<double, 3, Eigen::Dynamic> VelocitySpace::shape_gradients(
    const std::array<double, 4>& l, const Eigen::Matrix<double, 3, 4>& gl) const {
  Eigen::Matrix<double, 3, Eigen::Dynamic> g(3, nodes_per_cell());
  if (degree_ == 1) {
    g = gl;
    return g;
  }
  for (int i = 0; i < 4; ++i) g.col(i) = (4.0 * l[i] - 1.0) * gl.col(i);
  for (int e = 0; e < 6; ++e) {
    const int i = kTetEdges[e][0];
    const int j = kTetEdges[e][1];
    g.col(4 + e) = 4.0 * (l[i] * gl.col(j) + l[j] * gl.col(i));
  }
  return g;
}

VelocitySpace::LocalValues VelocitySpace::local_values(int cell, const std::array<double, 4>& l) const {
  const int np = nodes_per_cell();
  LocalValues v = LocalValues::Zero(3, local_dim());
  double phi[10];
  shape_values(l, phi);
  for (int a = 0; a < np; ++a) {
    for (int c = 0; c < 3; ++c) v(c, 3 * a + c) = phi[a];
  }
  if (bubbles_) {
    for (int i = 0; i < 4; ++i) {
      double b = 27.0;
      for (int j = 0; j < 4; ++j) {
        if (j != i) b *= l[j];
      }
      v.col(3 * np + i) = b * face_normals_[cell_face(cell, i)];
    }
  }
  return v;
}

VelocitySpace::LocalGradients VelocitySpace::local_gradients(int cell, const std::array<double, 4>& l,
                                                             const Eigen::Matrix<double, 3, 4>& gl) const {
  const int np = nodes_per_cell();
  LocalGradients g = LocalGradients::Zero(9, local_dim());
  const auto sg = shape_gradients(l, gl);
  for (int a = 0; a < np; ++a) {
    for (int c = 0; c < 3; ++c) g.block<3, 1>(3 * c, 3 * a + c) = sg.col(a);
  }
  if (bubbles_) {
    for (int i = 0; i < 4; ++i) {
      Vec3 grad = Vec3::Zero();
      for (int j = 0; j < 4; ++j) {
        if (j == i) continue;
        double p = 27.0;
        for (int k = 0; k < 4; ++k) {
          if (k != i && k != j) p *= l[k];
        }
        grad += p * gl.col(j);
      }
      const Vec3& nf = face_normals_[cell_face(cell, i)];
      for (int c = 0; c < 3; ++c) g.block<3, 1>(3 * c, 3 * np + i) = nf[c] * grad;
    }
  }
  return g;
}

namespace {

// (int_F f.n - int_F u_h.n) / int_F b_F, with u_h the nodal part on the face.
double flux_defect(const VelocitySpace& space, int face, const VectorFunction& f,
                   const std::function<Vec3(int)>& nodal) {
  const Mesh& mesh = space.mesh();
  const auto& v = space.face_vertices(face);
  const Vec3 p[3] = {mesh.vertices[v[0]], mesh.vertices[v[1]], mesh.vertices[v[2]]};
  const Vec3& n = space.face_normal(face);
  std::vector<Vec3> values;
  for (const Vec3& x : p) values.push_back(nodal(space.node_at(x)));
  if (space.degree() == 2) {
    for (const auto& e : kTriEdges) values.push_back(nodal(space.node_at(0.5 * (p[e[0]] + p[e[1]]))));
  }
  double defect = 0.0;
  for (const auto& q : tri_rule_degree8()) {
    const auto& l = q.lambda;
    const Vec3 x = l[0] * p[0] + l[1] * p[1] + l[2] * p[2];
    Vec3 uh = Vec3::Zero();
    if (space.degree() == 1) {
      for (int a = 0; a < 3; ++a) uh += l[a] * values[a];
    } else {
      for (int a = 0; a < 3; ++a) uh += l[a] * (2.0 * l[a] - 1.0) * values[a];
      for (int e = 0; e < 3; ++e) uh += 4.0 * l[kTriEdges[e][0]] * l[kTriEdges[e][1]] * values[3 + e];
    }
    defect += q.weight * (f(x) - uh).dot(n);
  }
  // int_F 27 l0 l1 l2 = 27/60 |F|; the area cancels
  return defect / 0.45;
}

}  // namespace

double VelocitySpace::bubble_coefficient(int face, const VectorFunction& f, const Eigen::VectorXd& u) const {
  return flux_defect(*this, face, f, [&u](int node) { return Vec3(u.segment<3>(3 * node)); });
}

Eigen::VectorXd VelocitySpace::interpolate(const VectorFunction& f) const {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(dim());
  for (int i = 0; i < num_nodes(); ++i) u.segment<3>(3 * i) = f(nodes_[i]);
  if (bubbles_) {
    for (int face = 0; face < num_faces(); ++face) u[bubble_dof(face)] = bubble_coefficient(face, f, u);
  }
  return u;
}

PressureSpace::PressureSpace(const Mesh& mesh, Kind kind) : mesh_(&mesh), kind_(kind) {}

std::vector<int> PressureSpace::domain_dofs(Domain domain) const {
  const Mesh& mesh = *mesh_;
  std::vector<char> keep(dim(), 0);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    if (domain == Domain::Exterior && mesh.cell_region[c] != Region::Exterior) continue;
    for (int l = 0; l < dofs_per_cell(); ++l) keep[cell_dof(c, l)] = 1;
  }
  std::vector<int> dofs;
  for (int i = 0; i < dim(); ++i) {
    if (keep[i]) dofs.push_back(i);
  }
  return dofs;
}

TraceSpace::TraceSpace(const VelocitySpace& velocity) : velocity_(&velocity) {
  const Mesh& mesh = velocity.mesh();
  for (int i = 0; i < velocity.num_nodes(); ++i) {
    if (velocity.node_on_gamma(i)) gamma_nodes_.push_back(i);
  }
  for (const auto& face : mesh.faces) {
    if (face.tag == FaceTag::Gamma) gamma_faces_.push_back(velocity.face_id(face.vertices));
  }
  for (int node : gamma_nodes_) {
    for (int c = 0; c < 3; ++c) to_velocity_.push_back(3 * node + c);
  }
  if (velocity.face_bubbles()) {
    for (int f : gamma_faces_) to_velocity_.push_back(velocity.bubble_dof(f));
  }
  to_trace_.assign(velocity.dim(), -1);
  for (int k = 0; k < dim(); ++k) to_trace_[to_velocity_[k]] = k;

  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& face : mesh.faces) {
    if (face.tag != FaceTag::Gamma) continue;
    const auto dofs = face_dofs(face);
    const int nloc = static_cast<int>(dofs.size());
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(nloc, nloc);
    for (const auto& q : tri_rule_degree8()) {
      const auto v = face_values(face, q.lambda);
      local.noalias() += q.weight * face.area * v.transpose() * v;
    }
    for (int a = 0; a < nloc; ++a) {
      for (int b = 0; b < nloc; ++b) {
        if (local(a, b) != 0.0) trip.emplace_back(dofs[a], dofs[b], local(a, b));
      }
    }
  }
  mass_.resize(dim(), dim());
  mass_.setFromTriplets(trip.begin(), trip.end());
  mass_solver_ = std::make_shared<Eigen::SimplicialLDLT<SparseMatrix>>(mass_);
  if (mass_solver_->info() != Eigen::Success) throw SolverError("boundary mass matrix factorization failed");
}

std::vector<int> TraceSpace::face_nodes(const BoundaryFace& face) const {
  const Mesh& mesh = velocity_->mesh();
  std::vector<int> nodes;
  for (int v : face.vertices) nodes.push_back(velocity_->node_at(mesh.vertices[v]));
  if (velocity_->degree() == 2) {
    for (const auto& e : kTriEdges) {
      nodes.push_back(velocity_->node_at(0.5 * (mesh.vertices[face.vertices[e[0]]] + mesh.vertices[face.vertices[e[1]]])));
    }
  }
  return nodes;
}

std::vector<int> TraceSpace::face_dofs(const BoundaryFace& face) const {
  std::vector<int> dofs;
  for (int node : face_nodes(face)) {
    for (int c = 0; c < 3; ++c) dofs.push_back(to_trace_[3 * node + c]);
  }
  if (velocity_->face_bubbles()) dofs.push_back(to_trace_[velocity_->bubble_dof(velocity_->face_id(face.vertices))]);
  return dofs;
}

Eigen::Matrix<double, 3, Eigen::Dynamic> TraceSpace::face_values(const BoundaryFace& face,
                                                                 const std::array<double, 3>& l) const {
  const int nn = velocity_->degree() == 2 ? 6 : 3;
  const bool bubble = velocity_->face_bubbles();
  Eigen::Matrix<double, 3, Eigen::Dynamic> v = Eigen::Matrix<double, 3, Eigen::Dynamic>::Zero(3, 3 * nn + bubble);
  double phi[6];
  if (nn == 3) {
    for (int i = 0; i < 3; ++i) phi[i] = l[i];
  } else {
    for (int i = 0; i < 3; ++i) phi[i] = l[i] * (2.0 * l[i] - 1.0);
    for (int e = 0; e < 3; ++e) phi[3 + e] = 4.0 * l[kTriEdges[e][0]] * l[kTriEdges[e][1]];
  }
  for (int a = 0; a < nn; ++a) {
    for (int c = 0; c < 3; ++c) v(c, 3 * a + c) = phi[a];
  }
  if (bubble) v.col(3 * nn) = 27.0 * l[0] * l[1] * l[2] * face.normal;
  return v;
}

double TraceSpace::dual_norm(const Eigen::VectorXd& action) const {
  const Eigen::VectorXd r = mass_solver_->solve(action);
  return std::sqrt(std::max(0.0, action.dot(r)));
}

double TraceSpace::dual_norm(const CotraceDensity& phi) const { return dual_norm(phi.action); }

double TraceSpace::l2_norm(const TraceField& psi) const {
  return std::sqrt(std::max(0.0, psi.coeffs.dot(mass_ * psi.coeffs)));
}

TraceField TraceSpace::riesz(const CotraceDensity& phi) const { return {mass_solver_->solve(phi.action)}; }

CotraceDensity TraceSpace::to_density(const TraceField& psi) const { return {mass_ * psi.coeffs}; }

CotraceDensity TraceSpace::density_from_function(const VectorFunction& g) const {
  const Mesh& mesh = velocity_->mesh();
  Eigen::VectorXd action = Eigen::VectorXd::Zero(dim());
  for (const auto& face : mesh.faces) {
    if (face.tag != FaceTag::Gamma) continue;
    const auto dofs = face_dofs(face);
    const Vec3& p0 = mesh.vertices[face.vertices[0]];
    const Vec3& p1 = mesh.vertices[face.vertices[1]];
    const Vec3& p2 = mesh.vertices[face.vertices[2]];
    for (const auto& q : tri_rule_degree8()) {
      const Vec3 x = q.lambda[0] * p0 + q.lambda[1] * p1 + q.lambda[2] * p2;
      const Eigen::VectorXd a = q.weight * face.area * face_values(face, q.lambda).transpose() * g(x);
      for (std::size_t k = 0; k < dofs.size(); ++k) action[dofs[k]] += a[k];
    }
  }
  return {action};
}

TraceField TraceSpace::interpolate(const VectorFunction& f) const {
  Eigen::VectorXd c(dim());
  std::vector<Vec3> nodal(velocity_->num_nodes(), Vec3::Zero());
  for (std::size_t k = 0; k < gamma_nodes_.size(); ++k) {
    nodal[gamma_nodes_[k]] = f(velocity_->node(gamma_nodes_[k]));
    c.segment<3>(3 * k) = nodal[gamma_nodes_[k]];
  }
  if (velocity_->face_bubbles()) {
    const int offset = 3 * static_cast<int>(gamma_nodes_.size());
    for (std::size_t k = 0; k < gamma_faces_.size(); ++k) {
      c[offset + static_cast<int>(k)] =
          flux_defect(*velocity_, gamma_faces_[k], f, [&nodal](int node) { return nodal[node]; });
    }
  }
  return {c};
}

std::unique_ptr<Spaces> build_spaces(const Mesh& mesh, int velocity_degree, PressureSpace::Kind pressure,
                                     bool face_bubbles) {
  return std::make_unique<Spaces>(mesh, velocity_degree, pressure, face_bubbles);
}

std::unique_ptr<Spaces> build_spaces(const Mesh& mesh) { return build_spaces(mesh, 2, PressureSpace::Kind::P0, true); }

TraceField trace(const TraceSpace& space, const Eigen::VectorXd& u, Side /*side*/) {
  Eigen::VectorXd c(space.dim());
  for (int k = 0; k < space.dim(); ++k) c[k] = u[space.velocity_dof(k)];
  return {c};
}

Eigen::VectorXd lift(const TraceSpace& space, const TraceField& phi) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(space.velocity().dim());
  for (int k = 0; k < space.dim(); ++k) u[space.velocity_dof(k)] = phi.coeffs[k];
  return u;
}

CotraceDensity normal_density(const TraceSpace& space) {
  const Mesh& mesh = space.velocity().mesh();
  Eigen::VectorXd action = Eigen::VectorXd::Zero(space.dim());
  for (const auto& face : mesh.faces) {
    if (face.tag != FaceTag::Gamma) continue;
    const auto dofs = space.face_dofs(face);
    for (const auto& q : tri_rule_degree8()) {
      const Eigen::VectorXd a = q.weight * face.area * space.face_values(face, q.lambda).transpose() * face.normal;
      for (std::size_t k = 0; k < dofs.size(); ++k) action[dofs[k]] += a[k];
    }
  }
  return {action};
}

QuotientDensity normalize_quotient(const TraceSpace& space, const CotraceDensity& phi) {
  const CotraceDensity nu = normal_density(space);
  const Eigen::VectorXd riesz_nu = space.riesz(nu).coeffs;
  const double c = phi.action.dot(riesz_nu) / nu.action.dot(riesz_nu);
  return {{phi.action - c * nu.action}};
}

DofRestriction::DofRestriction(int full_dim, std::vector<int> kept)
    : kept_(std::move(kept)), full_to_reduced_(full_dim, -1) {
  for (std::size_t i = 0; i < kept_.size(); ++i) full_to_reduced_[kept_[i]] = static_cast<int>(i);
}

Eigen::VectorXd DofRestriction::restrict(const Eigen::VectorXd& full) const {
  Eigen::VectorXd r(dim());
  for (int i = 0; i < dim(); ++i) r[i] = full[kept_[i]];
  return r;
}

Eigen::MatrixXd DofRestriction::restrict(const Eigen::MatrixXd& full) const {
  Eigen::MatrixXd r(dim(), full.cols());
  for (int i = 0; i < dim(); ++i) r.row(i) = full.row(kept_[i]);
  return r;
}

Eigen::VectorXd DofRestriction::prolong(const Eigen::VectorXd& reduced) const {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(full_dim());
  for (int i = 0; i < dim(); ++i) f[kept_[i]] = reduced[i];
  return f;
}

Eigen::MatrixXd DofRestriction::prolong(const Eigen::MatrixXd& reduced) const {
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(full_dim(), reduced.cols());
  for (int i = 0; i < dim(); ++i) f.row(kept_[i]) = reduced.row(i);
  return f;
}

SparseMatrix DofRestriction::restrict(const SparseMatrix& m, const DofRestriction& rows, const DofRestriction& cols) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(m.nonZeros());
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      const int r = rows.reduced(static_cast<int>(it.row()));
      const int c = cols.reduced(static_cast<int>(it.col()));
      if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
    }
  }
  SparseMatrix out(rows.dim(), cols.dim());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

}  // namespace varstokes
