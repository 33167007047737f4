#include "varstokes/viscosity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "varstokes/errors.hpp"

namespace varstokes {

namespace {

std::vector<double> parse_numbers(const std::string& body, const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("viscosity spec '" + spec + "': cannot parse number '" + item + "'");
    }
  }
  return out;
}

}  // namespace

ViscosityField ViscosityField::parse(const std::string& spec, std::optional<double> bound) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ConfigError("viscosity spec '" + spec + "': expected '<kind>:<values>'");
  const std::string name = spec.substr(0, colon);
  ViscosityField mu;
  mu.spec_ = spec;
  mu.params_ = parse_numbers(spec.substr(colon + 1), spec);
  std::size_t expected = 0;
  if (name == "const") {
    mu.kind_ = Kind::Constant;
    expected = 1;
  } else if (name == "two-phase") {
    mu.kind_ = Kind::TwoPhase;
    expected = 2;
  } else if (name == "checkerboard") {
    mu.kind_ = Kind::Checkerboard;
    expected = 3;
  } else {
    throw ConfigError("viscosity spec '" + spec + "': unknown kind '" + name + "'");
  }
  if (mu.params_.size() != expected) {
    throw ConfigError("viscosity spec '" + spec + "': kind '" + name + "' takes " + std::to_string(expected) +
                      " values");
  }
  const std::size_t nvalues = mu.kind_ == Kind::Checkerboard ? 2 : expected;
  double c = 1.0;
  for (std::size_t i = 0; i < nvalues; ++i) {
    const double v = mu.params_[i];
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError("viscosity spec '" + spec + "': values must be positive and finite");
    }
    c = std::max({c, v, 1.0 / v});
  }
  if (mu.kind_ == Kind::Checkerboard && !(mu.params_[2] > 0.0)) {
    throw ConfigError("viscosity spec '" + spec + "': checkerboard period must be positive");
  }
  if (bound) {
    if (!(*bound > 0.0)) throw ConfigError("viscosity bound must be positive");
    mu.bound_ = *bound;
  } else {
    mu.bound_ = c;
  }
  return mu;
}

ViscosityField ViscosityField::constant(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("constant viscosity must be positive and finite");
  ViscosityField mu;
  std::ostringstream spec;
  spec.precision(17);
  spec << "const:" << c;
  mu.spec_ = spec.str();
  mu.params_ = {c};
  mu.bound_ = std::max(c, 1.0 / c);
  return mu;
}

double ViscosityField::value(const Vec3& x, Region region) const {
  switch (kind_) {
    case Kind::Constant:
      return params_[0];
    case Kind::TwoPhase:
      return region == Region::Interior ? params_[0] : params_[1];
    case Kind::Checkerboard: {
      const double p = params_[2];
      const long s = static_cast<long>(std::floor(x[0] / p) + std::floor(x[1] / p) + std::floor(x[2] / p));
      return (s % 2 == 0) ? params_[0] : params_[1];
    }
  }
  return params_[0];
}

double ViscosityField::cell_value(const Mesh& mesh, int cell) const {
  return value(mesh.centroid(cell), mesh.cell_region[cell]);
}

std::vector<double> ViscosityField::cell_values(const Mesh& mesh) const {
  std::vector<double> mu(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    mu[c] = cell_value(mesh, c);
    if (mu[c] > bound_ * (1 + 1e-14) || mu[c] * bound_ < 1 - 1e-14) {
      const Vec3 x = mesh.centroid(c);
      std::ostringstream msg;
      msg << "viscosity " << mu[c] << " at (" << x[0] << ", " << x[1] << ", " << x[2] << ") violates bound c_mu="
          << bound_;
      throw AssemblyError(msg.str());
    }
  }
  return mu;
}

bool ViscosityField::is_constant() const {
  return kind_ == Kind::Constant || params_[0] == params_[1];
}

}  // namespace varstokes
