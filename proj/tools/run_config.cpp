#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "varstokes/errors.hpp"

namespace varstokes::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a finite number, got '" + value + "'");
}

long long parse_integer(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected an integer, got '" + value + "'");
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

void require_one_of(const std::string& key, const std::string& value, std::initializer_list<const char*> allowed) {
  std::string list;
  for (const char* a : allowed) {
    if (value == a) return;
    list += list.empty() ? a : std::string("|") + a;
  }
  throw ConfigError(key + ": expected one of " + list + ", got '" + value + "'");
}

}  // namespace

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(static_cast<int>(parse_integer(key, trim(item))));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "a") {
    c.geometry.a = parse_double(key, value);
  } else if (key == "R") {
    c.geometry.R = parse_double(key, value);
  } else if (key == "n") {
    c.geometry.n = static_cast<int>(parse_integer(key, value));
  } else if (key == "mu") {
    c.mu = value;
  } else if (key == "data") {
    c.data = value;
  } else if (key == "method") {
    c.method = value;
  } else if (key == "tol") {
    c.tol = parse_double(key, value);
  } else if (key == "solver_tol") {
    c.solver_tol = parse_double(key, value);
  } else if (key == "seed") {
    const long long s = parse_integer(key, value);
    if (s < 0) throw ConfigError("seed: must be nonnegative");
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "samples") {
    c.samples = static_cast<int>(parse_integer(key, value));
  } else if (key == "levels") {
    c.levels = parse_int_list(key, value);
    c.levels_set = true;
  } else if (key == "rstudy_n") {
    c.rstudy_n = static_cast<int>(parse_integer(key, value));
  } else if (key == "study") {
    c.study = value;
  } else if (key == "element") {
    c.element = value;
  } else if (key == "out") {
    c.out = value;
  } else if (key == "write_mesh") {
    c.write_mesh = parse_bool(key, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

std::map<std::string, std::string> read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config " + path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

void RunConfig::validate() const {
  try {
    geometry.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("geometry: ") + e.what());
  }
  (void)viscosity();
  require_one_of("method", method, {"variational", "potential", "both"});
  require_one_of("study", study, {"h", "R", "both"});
  require_one_of("element", element, {"p2b", "p2", "p1p1"});
  if (tol && !(*tol >= 0.0)) throw ConfigError("tol: must be >= 0");
  if (!(solver_tol > 0.0) || solver_tol >= 1.0) throw ConfigError("solver_tol: must lie in (0,1)");
  if (samples < 1) throw ConfigError("samples: must be >= 1");
  for (int n : levels) {
    GeometrySpec g = geometry;
    g.n = n;
    try {
      g.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("levels: ") + e.what());
    }
  }
  if (out.empty()) throw ConfigError("out: empty output directory");
}

ViscosityField RunConfig::viscosity() const {
  try {
    return ViscosityField::parse(mu);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("mu: ") + e.what());
  }
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["a"] = geometry.a;
  j["R"] = geometry.R;
  j["n"] = geometry.n;
  j["mu"] = mu;
  j["data"] = data;
  j["method"] = method;
  j["tol"] = tol ? nlohmann::ordered_json(*tol) : nlohmann::ordered_json(nullptr);
  j["solver_tol"] = solver_tol;
  j["seed"] = seed;
  j["samples"] = samples;
  j["levels"] = levels;
  j["rstudy_n"] = rstudy_n;
  j["study"] = study;
  j["element"] = element;
  return j;
}

}  // namespace varstokes::cli
