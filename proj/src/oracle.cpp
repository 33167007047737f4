#include "varstokes/oracle.hpp"

#include <cmath>
#include <numbers>

#include "varstokes/errors.hpp"
#include "varstokes/quadrature.hpp"

namespace varstokes {

double Poly1D::operator()(double t) const {
  double v = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * t + *it;
  return v;
}

Poly1D Poly1D::derivative() const {
  if (c_.size() <= 1) return Poly1D({0.0});
  std::vector<double> d(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = static_cast<double>(i) * c_[i];
  return Poly1D(std::move(d));
}

Poly1D Poly1D::operator*(const Poly1D& o) const {
  if (c_.empty() || o.c_.empty()) return Poly1D();
  std::vector<double> r(c_.size() + o.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < c_.size(); ++i) {
    for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  }
  return Poly1D(std::move(r));
}

Bump1D::Bump1D(double l, double r, int k) : l_(l), r_(r) {
  // q(t) = 4 (t-l)(r-t)/(r-l)^2 = (-4 t^2 + 4(l+r) t - 4 l r) / (r-l)^2
  const double s = 1.0 / ((r - l) * (r - l));
  const Poly1D q({-4.0 * l * r * s, 4.0 * (l + r) * s, -4.0 * s});
  Poly1D p({1.0});
  for (int i = 0; i < k; ++i) p = p * q;
  derivs_.push_back(p);
  for (int d = 1; d <= 4; ++d) derivs_.push_back(derivs_.back().derivative());
}

double Bump1D::operator()(double t, int d) const {
  if (t <= l_ || t >= r_) return 0.0;
  return derivs_[d](t);
}

Matrix3 stokeslet(const Vec3& x, const Vec3& y, double mu) {
  const Vec3 r = x - y;
  const double n = r.norm();
  if (n == 0.0) throw PreconditionError("Stokeslet evaluated at its pole");
  return (Matrix3::Identity() / n + r * r.transpose() / (n * n * n)) / (8.0 * std::numbers::pi * mu);
}

Vec3 pressurelet(const Vec3& x, const Vec3& y) {
  const Vec3 r = x - y;
  const double n = r.norm();
  if (n == 0.0) throw PreconditionError("pressurelet evaluated at its pole");
  return r / (4.0 * std::numbers::pi * n * n * n);
}

Matrix3 stokeslet_gradient(const Vec3& x, const Vec3& y, double mu, const Vec3& force) {
  const Vec3 r = x - y;
  const double n = r.norm();
  if (n == 0.0) throw PreconditionError("Stokeslet evaluated at its pole");
  const double n3 = n * n * n;
  const double rf = r.dot(force);
  Matrix3 g = -force * r.transpose() / n3 + Matrix3::Identity() * (rf / n3) + r * force.transpose() / n3 -
              3.0 * rf / (n3 * n * n) * r * r.transpose();
  return g / (8.0 * std::numbers::pi * mu);
}

double distance_to_gamma(const Vec3& x, double a) {
  const Eigen::Array3d d = x.array().abs() - a;
  if ((d <= 0.0).all()) return -d.maxCoeff();
  return d.max(0.0).matrix().norm();
}

Vec3 classical_single_layer(const Mesh& mesh, const VectorFunction& density, const Vec3& x, double mu, int levels,
                            double min_distance) {
  const double dist = distance_to_gamma(x, mesh.spec.a);
  if (dist < min_distance) {
    throw PreconditionError("probe at distance " + std::to_string(dist) + " from Gamma is closer than " +
                            std::to_string(min_distance));
  }
  const int m = 1 << levels;  // sub-edges per face edge
  const auto& rule = tri_rule_degree5();
  Vec3 sum = Vec3::Zero();
  for (const auto& face : mesh.faces) {
    if (face.tag != FaceTag::Gamma) continue;
    const Vec3& p0 = mesh.vertices[face.vertices[0]];
    const Vec3 e1 = (mesh.vertices[face.vertices[1]] - p0) / m;
    const Vec3 e2 = (mesh.vertices[face.vertices[2]] - p0) / m;
    const double sub_area = face.area / (m * m);
    // m^2 sub-triangles: "up" (i,j),(i+1,j),(i,j+1) and "down" (i+1,j),(i+1,j+1),(i,j+1)
    for (int i = 0; i < m; ++i) {
      for (int j = 0; i + j < m; ++j) {
        const Vec3 a = p0 + i * e1 + j * e2;
        for (const auto& q : rule) {
          const Vec3 y = a + q.lambda[1] * e1 + q.lambda[2] * e2;
          sum += q.weight * sub_area * (stokeslet(x, y, mu) * density(y));
        }
        if (i + j + 2 <= m) {
          const Vec3 b = p0 + (i + 1) * e1 + (j + 1) * e2;
          for (const auto& q : rule) {
            const Vec3 y = b - q.lambda[1] * e1 - q.lambda[2] * e2;
            sum += q.weight * sub_area * (stokeslet(x, y, mu) * density(y));
          }
        }
      }
    }
  }
  return sum;
}

namespace {

// X(x) Y(y) Z(z) with derivative orders (i,j,k).
struct Separable {
  Bump1D x, y, z;
  double operator()(const Vec3& p, int i, int j, int k) const { return x(p[0], i) * y(p[1], j) * z(p[2], k); }
};

ManufacturedSolution curl_bump(const ViscosityField& mu, const GeometrySpec& g) {
  if (mu.kind() == ViscosityField::Kind::Checkerboard) {
    throw ConfigError("manufactured 'curl-bump' needs a viscosity that is constant on Omega_-");
  }
  const double a = g.a;
  const double R = g.R;
  const double mu_minus = mu.value(Vec3(R, R, R), Region::Exterior);
  // vector potential (b2, 0, b); support x in [a,R], |y|,|z| <= R
  const Separable b{Bump1D(a, R, 3), Bump1D(-R, R, 3), Bump1D(-R, R, 3)};
  const Separable b2{Bump1D(a, R, 3), Bump1D(-R, 0.5 * R, 3), Bump1D(-0.5 * R, R, 3)};
  const Separable pi{Bump1D(a, R, 2), Bump1D(-R, R, 2), Bump1D(-R, R, 2)};
  ManufacturedSolution m;
  m.id = "curl-bump";
  m.u = [b, b2](const Vec3& x) {
    return Vec3(b(x, 0, 1, 0), b2(x, 0, 0, 1) - b(x, 1, 0, 0), -b2(x, 0, 1, 0));
  };
  m.grad_u = [b, b2](const Vec3& x) {
    Matrix3 G;
    for (int j = 0; j < 3; ++j) {
      const int dx = j == 0, dy = j == 1, dz = j == 2;
      G(0, j) = b(x, dx, 1 + dy, dz);
      G(1, j) = b2(x, dx, dy, 1 + dz) - b(x, 1 + dx, dy, dz);
      G(2, j) = -b2(x, dx, 1 + dy, dz);
    }
    return G;
  };
  m.p = [pi](const Vec3& x) { return pi(x, 0, 0, 0); };
  m.f = [b, b2, pi, mu_minus](const Vec3& x) {
    auto lap_d = [&x](const Separable& s, int i, int j, int k) {
      return s(x, i + 2, j, k) + s(x, i, j + 2, k) + s(x, i, j, k + 2);
    };
    const Vec3 lap_u(lap_d(b, 0, 1, 0), lap_d(b2, 0, 0, 1) - lap_d(b, 1, 0, 0), -lap_d(b2, 0, 1, 0));
    const Vec3 grad_p(pi(x, 1, 0, 0), pi(x, 0, 1, 0), pi(x, 0, 0, 1));
    return Vec3(mu_minus * lap_u - grad_p);
  };
  m.force_free = false;
  m.phi = m.u;
  return m;
}

}  // namespace

ManufacturedSolution manufactured(const std::string& id, const ViscosityField& mu, const GeometrySpec& geometry) {
  ManufacturedSolution m;
  m.id = id;
  if (id == "zero") {
    m.u = [](const Vec3&) { return Vec3::Zero().eval(); };
    m.grad_u = [](const Vec3&) { return Matrix3::Zero().eval(); };
    m.p = [](const Vec3&) { return 0.0; };
    m.f = m.u;
    m.phi = m.u;
    return m;
  }
  if (id == "curl-bump") return curl_bump(mu, geometry);
  if (id == "stokeslet-in") {
    if (!mu.is_constant() || mu.params()[0] != 1.0) {
      throw ConfigError("manufactured 'stokeslet-in' is valid for mu = 1 only (got '" + mu.spec() + "')");
    }
    const Vec3 y0 = geometry.a * Vec3(0.1, -0.2, 0.15);
    const Vec3 force(1.0, 0.5, -0.25);
    m.u = [y0, force](const Vec3& x) { return Vec3(stokeslet(x, y0, 1.0) * force); };
    m.grad_u = [y0, force](const Vec3& x) { return stokeslet_gradient(x, y0, 1.0, force); };
    m.p = [y0, force](const Vec3& x) { return pressurelet(x, y0).dot(force); };
    m.f = [](const Vec3&) { return Vec3::Zero().eval(); };
    m.phi = m.u;
    m.vanishes_on_outer = false;
    return m;
  }
  if (id == "radial") {
    if (!mu.is_constant()) throw ConfigError("manufactured 'radial' needs a constant viscosity");
    m.u = [](const Vec3& x) {
      const double r = x.norm();
      return Vec3(x / (4.0 * std::numbers::pi * r * r * r));
    };
    m.grad_u = [](const Vec3& x) {
      const double r = x.norm();
      return Matrix3((Matrix3::Identity() / (r * r * r) - 3.0 * x * x.transpose() / std::pow(r, 5)) /
                     (4.0 * std::numbers::pi));
    };
    m.p = [](const Vec3&) { return 0.0; };
    m.f = [](const Vec3&) { return Vec3::Zero().eval(); };
    m.phi = m.u;
    m.flux_free = false;
    m.vanishes_on_outer = false;
    return m;
  }
  throw ConfigError("unknown manufactured solution id '" + id + "' (known: zero, curl-bump, stokeslet-in, radial)");
}

}  // namespace varstokes
