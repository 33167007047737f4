#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <Eigen/SparseCholesky>

#include "varstokes/mesh.hpp"

namespace varstokes {

using SparseMatrix = Eigen::SparseMatrix<double>;
using VectorFunction = std::function<Vec3(const Vec3&)>;

enum class Side { Plus, Minus };

/// Which part of the box a problem lives on. Whole: B_R with the velocity
/// pinned on the outer boundary. Exterior: Omega_- cut by B_R, pinned on Gamma
/// and on the outer boundary.
enum class Domain { Whole, Exterior };

/// Continuous piecewise-polynomial vector fields (degree 1 or 2), optionally
/// enriched by one normal face bubble 27 l_a l_b l_c n_F per mesh face. Nodal
/// DOF 3*node+component come first, then bubble DOF 3*num_nodes()+face.
class VelocitySpace {
 public:
  using LocalValues = Eigen::Matrix<double, 3, Eigen::Dynamic>;
  /// Row 3*i+j holds d_j of component i.
  using LocalGradients = Eigen::Matrix<double, 9, Eigen::Dynamic>;

  VelocitySpace(const Mesh& mesh, int degree, bool face_bubbles);

  const Mesh& mesh() const { return *mesh_; }
  int degree() const { return degree_; }
  bool face_bubbles() const { return bubbles_; }
  int nodes_per_cell() const { return degree_ == 2 ? 10 : 4; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_faces() const { return static_cast<int>(face_vertices_.size()); }
  int dim() const { return 3 * num_nodes() + (bubbles_ ? num_faces() : 0); }
  /// Basis functions supported on one cell.
  int local_dim() const { return 3 * nodes_per_cell() + (bubbles_ ? 4 : 0); }
  const Vec3& node(int i) const { return nodes_[i]; }
  std::span<const int> cell_nodes(int cell) const {
    return {cell_nodes_.data() + static_cast<std::size_t>(cell) * nodes_per_cell(),
            static_cast<std::size_t>(nodes_per_cell())};
  }
  /// Face opposite local vertex i of the cell.
  int cell_face(int cell, int i) const { return cell_faces_[4 * static_cast<std::size_t>(cell) + i]; }
  const std::array<int, 3>& face_vertices(int face) const { return face_vertices_[face]; }
  /// Orientation of the face bubble; equals nu on Gamma faces.
  const Vec3& face_normal(int face) const { return face_normals_[face]; }
  /// Face with the given vertex triple; -1 if none.
  int face_id(const std::array<int, 3>& vertices) const;
  int bubble_dof(int face) const { return 3 * num_nodes() + face; }
  /// Global DOFs of the local basis, matching local_values columns.
  std::vector<int> cell_dofs(int cell) const;

  /// Node at position x; -1 if x is not a node.
  int node_at(const Vec3& x) const;

  bool node_on_outer(int i) const { return outer_[i]; }
  bool node_on_gamma(int i) const { return gamma_[i]; }
  /// Closed Omega_+ minus Gamma.
  bool node_interior(int i) const { return interior_[i]; }
  bool face_on_outer(int f) const { return face_outer_[f]; }
  bool face_on_gamma(int f) const { return face_gamma_[f]; }
  bool face_interior(int f) const { return face_interior_[f]; }
  /// DOF location flags (node or face carrying the DOF).
  bool dof_on_outer(int dof) const;
  bool dof_on_gamma(int dof) const;
  bool dof_interior(int dof) const;

  /// DOFs pinned on the outer boundary.
  std::vector<int> constrained_dofs() const;
  /// Unknown DOFs of the given domain, ascending.
  std::vector<int> free_dofs(Domain domain) const;

  /// Scalar nodal shape values at barycentric point lambda.
  void shape_values(const std::array<double, 4>& lambda, double* out) const;
  /// Scalar nodal shape gradients (3 x nodes_per_cell) given barycentric gradients.
  Eigen::Matrix<double, 3, Eigen::Dynamic> shape_gradients(const std::array<double, 4>& lambda,
                                                            const Eigen::Matrix<double, 3, 4>& grad_lambda) const;
  /// Vector values (3 x local_dim) of the cell basis.
  LocalValues local_values(int cell, const std::array<double, 4>& lambda) const;
  LocalGradients local_gradients(int cell, const std::array<double, 4>& lambda,
                                 const Eigen::Matrix<double, 3, 4>& grad_lambda) const;

  /// Nodal interpolant of f; bubble coefficients match the normal flux of f
  /// through each face.
  Eigen::VectorXd interpolate(const VectorFunction& f) const;
  /// Bubble coefficient giving the face the flux of f, given the nodal part of u.
  double bubble_coefficient(int face, const VectorFunction& f, const Eigen::VectorXd& u) const;

 private:
  const Mesh* mesh_;
  int degree_;
  bool bubbles_;
  std::vector<Vec3> nodes_;
  std::vector<int> cell_nodes_;
  std::vector<char> outer_, gamma_, interior_;
  std::vector<std::array<int, 3>> face_vertices_;
  std::vector<Vec3> face_normals_;
  std::vector<int> cell_faces_;
  std::vector<char> face_outer_, face_gamma_, face_interior_;
  std::unordered_map<std::uint64_t, int> face_lookup_;
  int fine_ = 0;  // nodes per axis on the structured node lattice
};

/// Piecewise-constant (P0) or continuous piecewise-linear (P1) pressure.
class PressureSpace {
 public:
  enum class Kind { P0, P1 };
  PressureSpace(const Mesh& mesh, Kind kind);

  Kind kind() const { return kind_; }
  int dim() const { return kind_ == Kind::P0 ? mesh_->num_cells() : mesh_->num_vertices(); }
  int dofs_per_cell() const { return kind_ == Kind::P0 ? 1 : 4; }
  int cell_dof(int cell, int local) const { return kind_ == Kind::P0 ? cell : mesh_->cells[cell][local]; }
  double shape_value(int local, const std::array<double, 4>& lambda) const {
    return kind_ == Kind::P0 ? 1.0 : lambda[local];
  }
  /// Pressure DOFs of the given domain (P0: cells of the region; P1: vertices of those cells).
  std::vector<int> domain_dofs(Domain domain) const;
  const Mesh& mesh() const { return *mesh_; }

 private:
  const Mesh* mesh_;
  Kind kind_;
};

/// Coefficients of a trace-space function (semantically H^{1/2}).
struct TraceField {
  Eigen::VectorXd coeffs;
};

/// Density stored by its action on the trace basis (semantically H^{-1/2}).
struct CotraceDensity {
  Eigen::VectorXd action;
};

/// Class [[phi]] in H^{-1/2}/R nu, represented by the member with
/// <representative, Riesz(nu)> = 0.
struct QuotientDensity {
  CotraceDensity representative;
};

/// Velocity DOFs on Gamma with the boundary mass matrix: 3 per Gamma node
/// (component k%3 of gamma_nodes()[k/3]), then one per Gamma face bubble.
class TraceSpace {
 public:
  explicit TraceSpace(const VelocitySpace& velocity);

  const VelocitySpace& velocity() const { return *velocity_; }
  int dim() const { return static_cast<int>(to_velocity_.size()); }
  const std::vector<int>& gamma_nodes() const { return gamma_nodes_; }
  /// Mesh faces on Gamma, in trace order.
  const std::vector<int>& gamma_faces() const { return gamma_faces_; }
  int velocity_dof(int k) const { return to_velocity_[k]; }
  /// Trace DOF of a velocity DOF, -1 off Gamma.
  int trace_dof(int velocity_dof) const { return to_trace_[velocity_dof]; }
  const SparseMatrix& mass() const { return mass_; }

  /// Trace DOFs living on a Gamma face, matching face_values columns.
  std::vector<int> face_dofs(const BoundaryFace& face) const;
  /// Vector values of the face basis at barycentric point lambda (vertex
  /// order of `face`).
  Eigen::Matrix<double, 3, Eigen::Dynamic> face_values(const BoundaryFace& face,
                                                       const std::array<double, 3>& lambda) const;

  double pairing(const CotraceDensity& phi, const TraceField& psi) const { return phi.action.dot(psi.coeffs); }
  /// sqrt(phi^T M^{-1} phi).
  double dual_norm(const CotraceDensity& phi) const;
  double dual_norm(const Eigen::VectorXd& action) const;
  /// sqrt(psi^T M psi).
  double l2_norm(const TraceField& psi) const;
  /// Riesz representative (coefficients) of a density.
  TraceField riesz(const CotraceDensity& phi) const;
  /// Density with action M psi.
  CotraceDensity to_density(const TraceField& psi) const;

  /// Action vector of integral_Gamma g . psi_i.
  CotraceDensity density_from_function(const VectorFunction& g) const;
  /// Interpolant on Gamma; agrees with the trace of VelocitySpace::interpolate.
  TraceField interpolate(const VectorFunction& f) const;

 private:
  std::vector<int> face_nodes(const BoundaryFace& face) const;

  const VelocitySpace* velocity_;
  std::vector<int> gamma_nodes_;
  std::vector<int> gamma_faces_;
  std::vector<int> to_velocity_;
  std::vector<int> to_trace_;
  SparseMatrix mass_;
  std::shared_ptr<Eigen::SimplicialLDLT<SparseMatrix>> mass_solver_;
};

struct Spaces {
  Spaces(const Mesh& mesh, int velocity_degree, PressureSpace::Kind pressure_kind, bool face_bubbles)
      : velocity(mesh, velocity_degree, face_bubbles), pressure(mesh, pressure_kind), trace(velocity) {}
  Spaces(const Spaces&) = delete;
  Spaces& operator=(const Spaces&) = delete;

  VelocitySpace velocity;
  PressureSpace pressure;
  TraceSpace trace;
};

/// P2 velocity with face bubbles, P0 pressure and the Gamma trace space. The
/// returned object holds pointers into `mesh`, which must outlive it.
std::unique_ptr<Spaces> build_spaces(const Mesh& mesh);
std::unique_ptr<Spaces> build_spaces(const Mesh& mesh, int velocity_degree, PressureSpace::Kind pressure,
                                     bool face_bubbles);

/// Restriction of a velocity field to Gamma. Both sides read the same shared
/// DOFs, so PLUS and MINUS coincide for every conforming field.
TraceField trace(const TraceSpace& space, const Eigen::VectorXd& u, Side side = Side::Plus);

/// Right inverse of trace: copies Gamma DOFs, zero elsewhere.
Eigen::VectorXd lift(const TraceSpace& space, const TraceField& phi);

/// Density of the unit normal: action_i = integral_Gamma nu . psi_i.
CotraceDensity normal_density(const TraceSpace& space);

/// Replace the representative by the member of phi + R nu orthogonal to Riesz(nu).
QuotientDensity normalize_quotient(const TraceSpace& space, const CotraceDensity& phi);

/// Maps between full and reduced index sets.
class DofRestriction {
 public:
  DofRestriction() = default;
  DofRestriction(int full_dim, std::vector<int> kept);

  int full_dim() const { return static_cast<int>(full_to_reduced_.size()); }
  int dim() const { return static_cast<int>(kept_.size()); }
  const std::vector<int>& kept() const { return kept_; }
  int reduced(int full) const { return full_to_reduced_[full]; }

  Eigen::VectorXd restrict(const Eigen::VectorXd& full) const;
  Eigen::MatrixXd restrict(const Eigen::MatrixXd& full) const;
  Eigen::VectorXd prolong(const Eigen::VectorXd& reduced) const;
  Eigen::MatrixXd prolong(const Eigen::MatrixXd& reduced) const;
  /// rows(M) restricted by `rows`, columns by `cols`.
  static SparseMatrix restrict(const SparseMatrix& m, const DofRestriction& rows, const DofRestriction& cols);

 private:
  std::vector<int> kept_;
  std::vector<int> full_to_reduced_;
};

}  // namespace varstokes
