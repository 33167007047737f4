#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "varstokes/fespace.hpp"
#include "varstokes/viscosity.hpp"

namespace varstokes {

using Matrix3 = Eigen::Matrix3d;
using GradientFunction = std::function<Matrix3(const Vec3&)>;
using ScalarFunction = std::function<double(const Vec3&)>;

/// Cells taken into an integral.
enum class CellSet { All, Interior, Exterior };

/// Symmetric part of a velocity gradient.
Matrix3 strain(const Matrix3& grad_u);

/// rho(x) = (1 + |x|^2)^{1/2}.
inline double weight_rho(const Vec3& x) { return std::sqrt(1.0 + x.squaredNorm()); }

/// a_mu and b on the full (unconstrained) DOF sets, plus the one-sided
/// pieces assembled over Omega_+ and Omega_- cells only.
struct AssembledForms {
  SparseMatrix A;        // velocity x velocity
  SparseMatrix B;        // pressure x velocity
  SparseMatrix A_plus, A_minus;
  SparseMatrix B_plus, B_minus;
  std::vector<double> cell_mu;
};

AssembledForms assemble(const ViscosityField& mu, const Spaces& spaces);

/// 2 int mu E(u):E(v) over the chosen cells, with one coefficient per cell.
SparseMatrix assemble_viscous(const VelocitySpace& velocity, const std::vector<double>& cell_mu, CellSet cells);
/// -int q div v over the chosen cells.
SparseMatrix assemble_divergence(const VelocitySpace& velocity, const PressureSpace& pressure, CellSet cells);
/// int grad u : grad v.
SparseMatrix assemble_vector_laplacian(const VelocitySpace& velocity, CellSet cells = CellSet::All);
/// int div u div v.
SparseMatrix assemble_div_div(const VelocitySpace& velocity, CellSet cells = CellSet::All);
/// int u . v.
SparseMatrix assemble_velocity_mass(const VelocitySpace& velocity, CellSet cells = CellSet::All);
/// Gram matrix of the weighted norm int rho^{-2}|u|^2 + int |grad u|^2.
SparseMatrix assemble_weighted_gram(const VelocitySpace& velocity, CellSet cells = CellSet::All);
/// Pressure mass matrix.
SparseMatrix assemble_pressure_mass(const PressureSpace& pressure, CellSet cells = CellSet::All);

/// Load vector int f . v over the chosen cells.
Eigen::VectorXd assemble_load(const VelocitySpace& velocity, const VectorFunction& f, CellSet cells);
/// Load vector 2 int mu E(u*):E(v) - int p* div v (weak form of a given pair).
Eigen::VectorXd assemble_weak_load(const VelocitySpace& velocity, const std::vector<double>& cell_mu,
                                   const GradientFunction& grad_u, const ScalarFunction& p, CellSet cells);

/// Velocity load vector whose action on v is <phi, gamma v>.
Eigen::VectorXd gamma_star(const TraceSpace& space, const CotraceDensity& phi);

/// One-sided conormal derivative, +-<t,Phi> = a_+-(u, lift Phi) + b_+-(lift Phi, pi) + <f~, lift Phi>,
/// with lift the DOF copy. f_tilde is a full velocity load vector (may be empty).
CotraceDensity conormal(const AssembledForms& forms, const TraceSpace& space, const Eigen::VectorXd& u,
                        const Eigen::VectorXd& pi, const Eigen::VectorXd& f_tilde, Side side);

/// Weighted norm (int rho^{-2}|u|^2 + int |grad u|^2)^{1/2} over the chosen cells.
double weighted_norm(const VelocitySpace& velocity, const Eigen::VectorXd& u, CellSet cells);
double h1_norm(const VelocitySpace& velocity, const Eigen::VectorXd& u, CellSet cells);
double l2_norm(const PressureSpace& pressure, const Eigen::VectorXd& p, CellSet cells);

/// Errors against closed forms, by cell quadrature.
double velocity_l2_error(const VelocitySpace& velocity, const Eigen::VectorXd& u, const VectorFunction& exact,
                         CellSet cells);
double velocity_h1_seminorm_error(const VelocitySpace& velocity, const Eigen::VectorXd& u,
                                  const GradientFunction& exact_grad, CellSet cells);
double pressure_l2_error(const PressureSpace& pressure, const Eigen::VectorXd& p, const ScalarFunction& exact,
                         CellSet cells);

/// True when `cell` belongs to the set.
bool cell_in(const Mesh& mesh, int cell, CellSet cells);

}  // namespace varstokes
