#include "varstokes/forms.hpp"

#include <cmath>

#include "varstokes/quadrature.hpp"

namespace varstokes {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;
using Values = VelocitySpace::LocalValues;
using Gradients = VelocitySpace::LocalGradients;

SparseMatrix from_triplets(int rows, int cols, const Triplets& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

// Calls body(cell, dofs, x, w, values, grads) at every quadrature point of
// every cell in the set; w already includes the cell volume.
template <class Body>
void for_each_point(const VelocitySpace& velocity, CellSet cells, Body&& body) {
  const Mesh& mesh = velocity.mesh();
  const auto& rule = tet_rule_degree5();
  for (int c = 0; c < mesh.num_cells(); ++c) {
    if (!cell_in(mesh, c, cells)) continue;
    const std::vector<int> dofs = velocity.cell_dofs(c);
    const double vol = mesh.volume(c);
    const Eigen::Matrix<double, 3, 4> gl = mesh.barycentric_gradients(c);
    for (const auto& q : rule) {
      body(c, dofs, mesh.map_point(c, q.lambda), q.weight * vol, velocity.local_values(c, q.lambda),
           velocity.local_gradients(c, q.lambda, gl));
    }
  }
}

Eigen::VectorXd gather(const Eigen::VectorXd& u, const std::vector<int>& dofs) {
  Eigen::VectorXd r(dofs.size());
  for (std::size_t k = 0; k < dofs.size(); ++k) r[k] = u[dofs[k]];
  return r;
}

Matrix3 unflatten(const Eigen::Matrix<double, 9, 1>& g) {
  Matrix3 G;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) G(i, j) = g[3 * i + j];
  }
  return G;
}

// Rows 3*j+i of the transposed gradient layout.
Gradients transposed(const Gradients& g) {
  Gradients t(9, g.cols());
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) t.row(3 * j + i) = g.row(3 * i + j);
  }
  return t;
}

Eigen::RowVectorXd divergence_row(const Gradients& g) { return g.row(0) + g.row(4) + g.row(8); }

template <class LocalFn>
SparseMatrix assemble_velocity_matrix(const VelocitySpace& velocity, CellSet cells, LocalFn&& fill) {
  const Mesh& mesh = velocity.mesh();
  const int nloc = velocity.local_dim();
  Triplets t;
  t.reserve(static_cast<std::size_t>(mesh.num_cells()) * nloc * nloc / 2);
  Eigen::MatrixXd local(nloc, nloc);
  const auto& rule = tet_rule_degree5();
  for (int c = 0; c < mesh.num_cells(); ++c) {
    if (!cell_in(mesh, c, cells)) continue;
    local.setZero();
    const double vol = mesh.volume(c);
    const Eigen::Matrix<double, 3, 4> gl = mesh.barycentric_gradients(c);
    for (const auto& q : rule) {
      fill(c, mesh.map_point(c, q.lambda), q.weight * vol, velocity.local_values(c, q.lambda),
           velocity.local_gradients(c, q.lambda, gl), local);
    }
    const std::vector<int> dofs = velocity.cell_dofs(c);
    for (int a = 0; a < nloc; ++a) {
      for (int b = 0; b < nloc; ++b) {
        if (local(a, b) != 0.0) t.emplace_back(dofs[a], dofs[b], local(a, b));
      }
    }
  }
  return from_triplets(velocity.dim(), velocity.dim(), t);
}

}  // namespace

bool cell_in(const Mesh& mesh, int cell, CellSet cells) {
  switch (cells) {
    case CellSet::All:
      return true;
    case CellSet::Interior:
      return mesh.cell_region[cell] == Region::Interior;
    case CellSet::Exterior:
      return mesh.cell_region[cell] == Region::Exterior;
  }
  return false;
}

Matrix3 strain(const Matrix3& grad_u) { return 0.5 * (grad_u + grad_u.transpose()); }

SparseMatrix assemble_viscous(const VelocitySpace& velocity, const std::vector<double>& cell_mu, CellSet cells) {
  // 2 E(u):E(v) = grad u : grad v + grad u : grad v^T
  return assemble_velocity_matrix(velocity, cells,
                                  [&](int c, const Vec3&, double w, const Values&, const Gradients& g,
                                      Eigen::MatrixXd& local) {
                                    local.noalias() += (w * cell_mu[c]) * g.transpose() * (g + transposed(g));
                                  });
}

SparseMatrix assemble_vector_laplacian(const VelocitySpace& velocity, CellSet cells) {
  return assemble_velocity_matrix(
      velocity, cells, [](int, const Vec3&, double w, const Values&, const Gradients& g, Eigen::MatrixXd& local) {
        local.noalias() += w * g.transpose() * g;
      });
}

SparseMatrix assemble_div_div(const VelocitySpace& velocity, CellSet cells) {
  return assemble_velocity_matrix(
      velocity, cells, [](int, const Vec3&, double w, const Values&, const Gradients& g, Eigen::MatrixXd& local) {
        const Eigen::RowVectorXd d = divergence_row(g);
        local.noalias() += w * d.transpose() * d;
      });
}

SparseMatrix assemble_velocity_mass(const VelocitySpace& velocity, CellSet cells) {
  return assemble_velocity_matrix(
      velocity, cells, [](int, const Vec3&, double w, const Values& v, const Gradients&, Eigen::MatrixXd& local) {
        local.noalias() += w * v.transpose() * v;
      });
}

SparseMatrix assemble_weighted_gram(const VelocitySpace& velocity, CellSet cells) {
  return assemble_velocity_matrix(velocity, cells,
                                  [](int, const Vec3& x, double w, const Values& v, const Gradients& g,
                                     Eigen::MatrixXd& local) {
                                    const double r2 = 1.0 / (1.0 + x.squaredNorm());
                                    local.noalias() += (w * r2) * v.transpose() * v;
                                    local.noalias() += w * g.transpose() * g;
                                  });
}

SparseMatrix assemble_divergence(const VelocitySpace& velocity, const PressureSpace& pressure, CellSet cells) {
  const Mesh& mesh = velocity.mesh();
  const int np = pressure.dofs_per_cell();
  Triplets t;
  Eigen::MatrixXd local(np, velocity.local_dim());
  const auto& rule = tet_rule_degree5();
  for (int c = 0; c < mesh.num_cells(); ++c) {
    if (!cell_in(mesh, c, cells)) continue;
    local.setZero();
    const double vol = mesh.volume(c);
    const Eigen::Matrix<double, 3, 4> gl = mesh.barycentric_gradients(c);
    for (const auto& q : rule) {
      const Eigen::RowVectorXd d = divergence_row(velocity.local_gradients(c, q.lambda, gl));
      for (int l = 0; l < np; ++l) local.row(l) -= (q.weight * vol * pressure.shape_value(l, q.lambda)) * d;
    }
    const std::vector<int> dofs = velocity.cell_dofs(c);
    for (int l = 0; l < np; ++l) {
      for (std::size_t a = 0; a < dofs.size(); ++a) {
        const double v = local(l, static_cast<int>(a));
        if (v != 0.0) t.emplace_back(pressure.cell_dof(c, l), dofs[a], v);
      }
    }
  }
  return from_triplets(pressure.dim(), velocity.dim(), t);
}

SparseMatrix assemble_pressure_mass(const PressureSpace& pressure, CellSet cells) {
  const Mesh& mesh = pressure.mesh();
  Triplets t;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    if (!cell_in(mesh, c, cells)) continue;
    const double vol = mesh.volume(c);
    if (pressure.kind() == PressureSpace::Kind::P0) {
      t.emplace_back(c, c, vol);
      continue;
    }
    // P1: vol/20 (1 + delta_ij)
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) t.emplace_back(mesh.cells[c][i], mesh.cells[c][j], vol / 20.0 * (i == j ? 2.0 : 1.0));
    }
  }
  return from_triplets(pressure.dim(), pressure.dim(), t);
}

AssembledForms assemble(const ViscosityField& mu, const Spaces& spaces) {
  AssembledForms forms;
  forms.cell_mu = mu.cell_values(spaces.velocity.mesh());
  forms.A_plus = assemble_viscous(spaces.velocity, forms.cell_mu, CellSet::Interior);
  forms.A_minus = assemble_viscous(spaces.velocity, forms.cell_mu, CellSet::Exterior);
  forms.A = forms.A_plus + forms.A_minus;
  forms.B_plus = assemble_divergence(spaces.velocity, spaces.pressure, CellSet::Interior);
  forms.B_minus = assemble_divergence(spaces.velocity, spaces.pressure, CellSet::Exterior);
  forms.B = forms.B_plus + forms.B_minus;
  return forms;
}

Eigen::VectorXd assemble_load(const VelocitySpace& velocity, const VectorFunction& f, CellSet cells) {
  Eigen::VectorXd load = Eigen::VectorXd::Zero(velocity.dim());
  for_each_point(velocity, cells,
                 [&](int, const std::vector<int>& dofs, const Vec3& x, double w, const Values& v, const Gradients&) {
                   const Eigen::VectorXd l = w * v.transpose() * f(x);
                   for (std::size_t a = 0; a < dofs.size(); ++a) load[dofs[a]] += l[a];
                 });
  return load;
}

Eigen::VectorXd assemble_weak_load(const VelocitySpace& velocity, const std::vector<double>& cell_mu,
                                   const GradientFunction& grad_u, const ScalarFunction& p, CellSet cells) {
  Eigen::VectorXd load = Eigen::VectorXd::Zero(velocity.dim());
  for_each_point(velocity, cells,
                 [&](int c, const std::vector<int>& dofs, const Vec3& x, double w, const Values&, const Gradients& g) {
                   const Matrix3 sigma = 2.0 * cell_mu[c] * strain(grad_u(x)) - p(x) * Matrix3::Identity();
                   Eigen::Matrix<double, 9, 1> s;
                   for (int i = 0; i < 3; ++i) {
                     for (int j = 0; j < 3; ++j) s[3 * i + j] = sigma(i, j);
                   }
                   const Eigen::VectorXd l = w * g.transpose() * s;
                   for (std::size_t a = 0; a < dofs.size(); ++a) load[dofs[a]] += l[a];
                 });
  return load;
}

Eigen::VectorXd gamma_star(const TraceSpace& space, const CotraceDensity& phi) {
  Eigen::VectorXd load = Eigen::VectorXd::Zero(space.velocity().dim());
  for (int k = 0; k < space.dim(); ++k) load[space.velocity_dof(k)] = phi.action[k];
  return load;
}

CotraceDensity conormal(const AssembledForms& forms, const TraceSpace& space, const Eigen::VectorXd& u,
                        const Eigen::VectorXd& pi, const Eigen::VectorXd& f_tilde, Side side) {
  const bool plus = side == Side::Plus;
  Eigen::VectorXd r = (plus ? forms.A_plus : forms.A_minus) * u;
  r.noalias() += (plus ? forms.B_plus : forms.B_minus).transpose() * pi;
  if (f_tilde.size() > 0) r += f_tilde;
  Eigen::VectorXd action(space.dim());
  const double sign = plus ? 1.0 : -1.0;
  for (int k = 0; k < space.dim(); ++k) action[k] = sign * r[space.velocity_dof(k)];
  return {action};
}

double weighted_norm(const VelocitySpace& velocity, const Eigen::VectorXd& u, CellSet cells) {
  double s = 0.0;
  for_each_point(velocity, cells,
                 [&](int, const std::vector<int>& dofs, const Vec3& x, double w, const Values& v, const Gradients& g) {
                   const Eigen::VectorXd ul = gather(u, dofs);
                   s += w * ((v * ul).squaredNorm() / (1.0 + x.squaredNorm()) + (g * ul).squaredNorm());
                 });
  return std::sqrt(s);
}

double h1_norm(const VelocitySpace& velocity, const Eigen::VectorXd& u, CellSet cells) {
  double s = 0.0;
  for_each_point(velocity, cells,
                 [&](int, const std::vector<int>& dofs, const Vec3&, double w, const Values& v, const Gradients& g) {
                   const Eigen::VectorXd ul = gather(u, dofs);
                   s += w * ((v * ul).squaredNorm() + (g * ul).squaredNorm());
                 });
  return std::sqrt(s);
}

double l2_norm(const PressureSpace& pressure, const Eigen::VectorXd& p, CellSet cells) {
  return pressure_l2_error(pressure, p, [](const Vec3&) { return 0.0; }, cells);
}

double velocity_l2_error(const VelocitySpace& velocity, const Eigen::VectorXd& u, const VectorFunction& exact,
                         CellSet cells) {
  double s = 0.0;
  for_each_point(velocity, cells,
                 [&](int, const std::vector<int>& dofs, const Vec3& x, double w, const Values& v, const Gradients&) {
                   s += w * (v * gather(u, dofs) - exact(x)).squaredNorm();
                 });
  return std::sqrt(s);
}

double velocity_h1_seminorm_error(const VelocitySpace& velocity, const Eigen::VectorXd& u,
                                  const GradientFunction& exact_grad, CellSet cells) {
  double s = 0.0;
  for_each_point(velocity, cells,
                 [&](int, const std::vector<int>& dofs, const Vec3& x, double w, const Values&, const Gradients& g) {
                   s += w * (unflatten(g * gather(u, dofs)) - exact_grad(x)).squaredNorm();
                 });
  return std::sqrt(s);
}

double pressure_l2_error(const PressureSpace& pressure, const Eigen::VectorXd& p, const ScalarFunction& exact,
                         CellSet cells) {
  const Mesh& mesh = pressure.mesh();
  double s = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    if (!cell_in(mesh, c, cells)) continue;
    const double vol = mesh.volume(c);
    for (const auto& q : tet_rule_degree5()) {
      double ph = 0.0;
      for (int l = 0; l < pressure.dofs_per_cell(); ++l) ph += pressure.shape_value(l, q.lambda) * p[pressure.cell_dof(c, l)];
      const double e = ph - exact(mesh.map_point(c, q.lambda));
      s += q.weight * vol * e * e;
    }
  }
  return std::sqrt(s);
}

}  // namespace varstokes
