#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

#include "varstokes/dirichlet.hpp"
#include "varstokes/errors.hpp"
#include "varstokes/oracle.hpp"
#include "varstokes/probes.hpp"

namespace varstokes::cli {

using Json = nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
  if (!std::isfinite(v)) return "";
  if (v == 0.0) return "0";
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

std::string quoted(const std::string& s) { return s.find(',') == std::string::npos ? s : "\"" + s + "\""; }

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("out: cannot write '" + path.string() + "'");
  out << text;
}

std::filesystem::path prepare_out(const RunConfig& config) {
  std::filesystem::path dir(config.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("out: cannot create '" + config.out + "': " + ec.message());
  return dir;
}

Json header(const char* command, const RunConfig& config) {
  Json j;
  j["command"] = command;
  j["config"] = config.to_json();
  return j;
}

void print_checks(const char* command, const std::vector<Check>& checks) {
  for (const Check& c : checks) {
    std::cout << command << ": " << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << num(c.value) << " (" << c.relation
              << " " << num(c.tolerance) << ")\n";
  }
}

void maybe_write_mesh(const RunConfig& config, const Mesh& mesh, const std::filesystem::path& dir) {
  if (config.write_mesh) write_mesh_txt(mesh, (dir / "mesh.txt").string());
}

std::vector<Vec3> exact_at(const VectorFunction& f, const std::vector<Vec3>& points) {
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const auto& x : points) out.push_back(f(x));
  return out;
}

struct Level {
  double h = 0.0;
  int n = 0;
  double R = 0.0;
  double err_h1 = 0.0, err_l2 = 0.0, err_probe = 0.0;
  double residual = 0.0;
};

// Variational exterior solve of a manufactured case, errors on Omega_- cut by the box.
Level exterior_level(const GeometrySpec& g, const ViscosityField& mu, const std::string& data, double solver_tol) {
  const Mesh mesh = build_box_mesh(g);
  const auto spaces = build_spaces(mesh);
  const ManufacturedSolution m = manufactured(data, mu, g);
  ExteriorSolver solver(*spaces, mu, SolveOptions{solver_tol});
  ExteriorProblem problem{assemble_load(spaces->velocity, m.f, CellSet::Exterior), spaces->trace.interpolate(m.phi)};
  const ExteriorSolution s = solver.solve_variational(problem);
  Level l;
  l.n = g.n;
  l.h = g.h();
  l.R = g.R;
  l.err_h1 = velocity_h1_seminorm_error(spaces->velocity, s.u, m.grad_u, CellSet::Exterior);
  l.err_l2 = velocity_l2_error(spaces->velocity, s.u, m.u, CellSet::Exterior);
  const auto probes = exterior_probes(g);
  l.err_probe = probe_distance(evaluate_all(spaces->velocity, s.u, probes), exact_at(m.u, probes));
  l.residual = std::max(s.momentum_residual, s.constraint_residual);
  return l;
}

double pair_rate(double e0, double e1, double h0, double h1) {
  if (!(e0 > 0.0) || !(e1 > 0.0)) return kNaN;
  return std::log(e0 / e1) / std::log(h0 / h1);
}

}  // namespace

Check check_le(std::string name, double value, double tol) {
  return {std::move(name), value, tol, "<=", value <= tol};
}
Check check_ge(std::string name, double value, double bound) {
  return {std::move(name), value, bound, ">=", value >= bound};
}
Check check_eq(std::string name, double value, double expected) {
  return {std::move(name), value, expected, "==", value == expected};
}

Json checks_json(const std::vector<Check>& checks) {
  Json arr = Json::array();
  for (const Check& c : checks) {
    Json j;
    j["name"] = c.name;
    j["value"] = finite_or_null(c.value);
    j["relation"] = c.relation;
    j["tolerance"] = c.tolerance;
    j["pass"] = c.pass;
    arr.push_back(j);
  }
  return arr;
}

bool all_pass(const std::vector<Check>& checks) {
  for (const Check& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

double fitted_slope(const std::vector<double>& h, const std::vector<double>& err) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int k = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(err[i] > 0.0) || !(h[i] > 0.0)) continue;
    const double x = std::log(h[i]);
    const double y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++k;
  }
  if (k < 2) return kNaN;
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

int cmd_verify(const RunConfig& config) {
  config.validate();
  const std::filesystem::path dir = prepare_out(config);
  const ViscosityField mu = config.viscosity();
  const Mesh mesh = build_box_mesh(config.geometry);
  const auto spaces = build_spaces(mesh);
  const TraceSpace& ts = spaces->trace;
  WholeSpaceStokes w(*spaces, mu, SolveOptions{config.solver_tol});

  std::vector<Check> checks;
  const CotraceDensity nu = normal_density(ts);
  const PotentialPair kernel = w.single_layer(nu);
  const Eigen::VectorXd chi = indicator_omega_plus(mesh);
  checks.push_back(check_le("kernel_velocity_h1", h1_norm(spaces->velocity, kernel.u, CellSet::All) / nu.action.norm(),
                            config.tolerance(1e-8)));
  checks.push_back(check_le("kernel_pressure_plus_chi_l2",
                            l2_norm(spaces->pressure, Eigen::VectorXd(kernel.p + chi), CellSet::All),
                            config.tolerance(1e-8)));

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal;
  double trace_jump = 0.0, conormal_jump = 0.0, plus = 0.0, minus = 0.0, range = 0.0, energy = 0.0;
  for (int s = 0; s < config.samples; ++s) {
    CotraceDensity phi{Eigen::VectorXd(ts.dim())};
    for (int i = 0; i < ts.dim(); ++i) phi.action[i] = normal(rng);
    const PotentialPair pair = w.single_layer(phi);
    const Eigen::VectorXd vphi = trace(ts, pair.u, Side::Plus).coeffs;
    trace_jump = std::max(trace_jump, (vphi - trace(ts, pair.u, Side::Minus).coeffs).norm());
    const auto [tp, tm] = w.conormals(pair);
    const Eigen::VectorXd kstar = 0.5 * (tp.action + tm.action);
    conormal_jump = std::max(conormal_jump, ts.dual_norm(Eigen::VectorXd(tp.action - tm.action - phi.action)));
    plus = std::max(plus, ts.dual_norm(Eigen::VectorXd(tp.action - (0.5 * phi.action + kstar))));
    minus = std::max(minus, ts.dual_norm(Eigen::VectorXd(tm.action - (-0.5 * phi.action + kstar))));
    range = std::max(range, std::abs(nu.action.dot(vphi)) / (phi.action.norm() * nu.action.norm()));
    const double a_uu = w.energy(pair.u);
    energy = std::max(energy, std::abs(phi.action.dot(vphi) - a_uu) / a_uu);
  }
  checks.push_back(check_le("trace_jump_max", trace_jump, config.tolerance(1e-12)));
  checks.push_back(check_le("conormal_jump_dual_max", conormal_jump, config.tolerance(1e-8)));
  checks.push_back(check_le("one_sided_plus_max", plus, config.tolerance(1e-8)));
  checks.push_back(check_le("one_sided_minus_max", minus, config.tolerance(1e-8)));
  checks.push_back(check_le("range_nu_pairing_max", range, config.tolerance(1e-10)));
  checks.push_back(check_le("energy_identity_rel_max", energy, config.tolerance(1e-9)));

  const VSpectrum spec = w.spectrum();
  int near_zero = 0;
  for (int i = 0; i < spec.values.size(); ++i) near_zero += spec.values[i] <= 1e-8 ? 1 : 0;
  checks.push_back(check_le("V_symmetry_defect", spec.symmetry_defect, config.tolerance(1e-10)));
  checks.push_back(check_ge("V_min_raw_eigenvalue", spec.min_raw_eigenvalue, -config.tolerance(1e-10)));
  checks.push_back(check_eq("V_near_zero_count", near_zero, 1));
  checks.push_back(check_ge("V_kernel_cosine_nu", spec.kernel_cosine, 0.999));

  Json report = header("verify", config);
  report["checks"] = checks_json(checks);
  Json sp;
  sp["pencil"] = "G x = lambda N x, N = dual weighted-H1 Gram of gamma* densities";
  sp["values"] = std::vector<double>(spec.values.data(), spec.values.data() + spec.values.size());
  sp["near_zero_count"] = near_zero;
  sp["second_smallest"] = spec.values.size() > 1 ? spec.values[1] : kNaN;
  sp["kernel_cosine"] = spec.kernel_cosine;
  report["spectrum"] = sp;
  report["all_pass"] = all_pass(checks);
  write_text(dir / "verify.json", report.dump(2) + "\n");
  maybe_write_mesh(config, mesh, dir);
  print_checks("verify", checks);
  return all_pass(checks) ? kPass : kCheckFailed;
}

int cmd_dirichlet(const RunConfig& config) {
  config.validate();
  const std::filesystem::path dir = prepare_out(config);
  const ViscosityField mu = config.viscosity();
  const GeometrySpec& g = config.geometry;
  const ManufacturedSolution m = manufactured(config.data, mu, g);
  const Mesh mesh = build_box_mesh(g);
  const auto spaces = build_spaces(mesh);
  const TraceSpace& ts = spaces->trace;
  ExteriorSolver solver(*spaces, mu, SolveOptions{config.solver_tol});

  ExteriorProblem problem{assemble_load(spaces->velocity, m.f, CellSet::Exterior), ts.interpolate(m.phi)};
  // the interpolant of a flux-free datum carries a tiny discrete flux
  if (m.flux_free && problem.phi.coeffs.norm() > 0.0) problem.phi = project_nu_orthogonal(ts, problem.phi);

  const bool run_pot = config.method != "variational";
  const bool run_var = config.method != "potential";
  std::vector<ExteriorSolution> solutions;
  if (run_pot) solutions.push_back(solver.solve_potential(problem));
  if (run_var) solutions.push_back(solver.solve_variational(problem));

  const auto probes = exterior_probes(g);
  const std::vector<Vec3> ref = exact_at(m.u, probes);
  std::vector<std::vector<Vec3>> at_probes;
  for (const auto& s : solutions) at_probes.push_back(evaluate_all(spaces->velocity, s.u, probes));

  std::vector<Check> checks;
  Json methods = Json::object();
  for (std::size_t k = 0; k < solutions.size(); ++k) {
    const ExteriorSolution& s = solutions[k];
    const std::string name = method_name(s.method);
    Json j;
    j["momentum_residual"] = s.momentum_residual;
    j["constraint_residual"] = s.constraint_residual;
    j["trace_error"] = s.trace_error;
    j["velocity_h1_norm"] = h1_norm(spaces->velocity, s.u, CellSet::Exterior);
    j["pressure_l2_norm"] = l2_norm(spaces->pressure, s.p, CellSet::Exterior);
    j["error_h1_seminorm"] = velocity_h1_seminorm_error(spaces->velocity, s.u, m.grad_u, CellSet::Exterior);
    j["error_l2"] = velocity_l2_error(spaces->velocity, s.u, m.u, CellSet::Exterior);
    const double ref_norm = probe_norm(ref);
    const double perr = probe_distance(at_probes[k], ref);
    j["probe_error"] = perr;
    j["probe_error_relative"] = ref_norm > 0.0 ? Json(perr / ref_norm) : Json(nullptr);
    methods[name] = j;
    checks.push_back(
        check_le(name + "_residual", std::max(s.momentum_residual, s.constraint_residual), config.tolerance(1e-10)));
    checks.push_back(check_le(name + "_trace_error", s.trace_error, config.tolerance(1e-8)));
  }

  Json report = header("dirichlet", config);
  report["datum_flux"] = normal_density(ts).action.dot(problem.phi.coeffs);
  report["methods"] = methods;
  if (solutions.size() == 2) {
    const double diff = probe_distance(at_probes[0], at_probes[1]);
    const double scale = probe_norm(at_probes[1]);
    Json a;
    a["probe_l2_difference"] = diff;
    a["relative"] = scale > 0.0 ? Json(diff / scale) : Json(nullptr);
    report["method_agreement"] = a;
  }
  report["checks"] = checks_json(checks);
  report["all_pass"] = all_pass(checks);

  std::ostringstream csv;
  csv << "x,y,z,var_x,var_y,var_z,pot_x,pot_y,pot_z,ref_x,ref_y,ref_z\n";
  for (std::size_t i = 0; i < probes.size(); ++i) {
    csv << num(probes[i][0]) << ',' << num(probes[i][1]) << ',' << num(probes[i][2]);
    for (const ExteriorSolution::Method wanted : {ExteriorSolution::Method::Variational, ExteriorSolution::Method::Potential}) {
      std::size_t k = 0;
      while (k < solutions.size() && solutions[k].method != wanted) ++k;
      for (int c = 0; c < 3; ++c) csv << ',' << (k < solutions.size() ? num(at_probes[k][i][c]) : "");
    }
    for (int c = 0; c < 3; ++c) csv << ',' << num(ref[i][c]);
    csv << '\n';
  }
  write_text(dir / "solution.csv", csv.str());
  write_text(dir / "summary.json", report.dump(2) + "\n");
  maybe_write_mesh(config, mesh, dir);
  print_checks("dirichlet", checks);
  return all_pass(checks) ? kPass : kCheckFailed;
}

int cmd_convergence(const RunConfig& config) {
  config.validate();
  if (config.levels.size() < 2) throw ConfigError("levels: a convergence study needs at least two levels");
  const std::filesystem::path dir = prepare_out(config);
  const ViscosityField mu = config.viscosity();
  const double a = config.geometry.a;
  std::vector<Check> checks;
  Json report = header("convergence", config);

  std::ostringstream csv;
  csv << "study,mu,R,n,h,err_h1,err_l2,err_probe,rate_h1,rate_l2\n";
  auto row = [&csv](const char* study, const std::string& mu_spec, const Level& l, double r1, double r2) {
    csv << study << ',' << quoted(mu_spec) << ',' << num(l.R) << ',' << l.n << ',' << num(l.h) << ',' << num(l.err_h1)
        << ',' << num(l.err_l2) << ',' << num(l.err_probe) << ',' << num(r1) << ',' << num(r2) << '\n';
  };

  if (config.study != "R") {
    const ManufacturedSolution m = manufactured(config.data, mu, config.geometry);
    std::vector<Level> levels;
    for (int n : config.levels) {
      GeometrySpec g = config.geometry;
      g.n = n;
      levels.push_back(exterior_level(g, mu, config.data, config.solver_tol));
      std::cout << "convergence: h-study n=" << n << " err_h1=" << num(levels.back().err_h1)
                << " err_l2=" << num(levels.back().err_l2) << "\n";
    }
    std::vector<double> hs, e1, e2;
    double max_err = 0.0, max_res = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const Level& l = levels[i];
      const double r1 = i == 0 ? kNaN : pair_rate(levels[i - 1].err_h1, l.err_h1, levels[i - 1].h, l.h);
      const double r2 = i == 0 ? kNaN : pair_rate(levels[i - 1].err_l2, l.err_l2, levels[i - 1].h, l.h);
      row("h", config.mu, l, r1, r2);
      hs.push_back(l.h);
      e1.push_back(l.err_h1);
      e2.push_back(l.err_l2);
      max_err = std::max({max_err, l.err_h1, l.err_l2, l.err_probe});
      max_res = std::max(max_res, l.residual);
    }
    const double s1 = fitted_slope(hs, e1);
    const double s2 = fitted_slope(hs, e2);
    std::cout << "convergence: least-squares slope h1 = " << num(s1) << ", l2 = " << num(s2) << "\n";
    Json h;
    h["data"] = config.data;
    h["slope_h1"] = finite_or_null(s1);
    h["slope_l2"] = finite_or_null(s2);
    h["max_solver_residual"] = max_res;
    report["h_study"] = h;
    checks.push_back(check_le("h_study_solver_residual", max_res, config.tolerance(1e-10)));
    if (max_err == 0.0) {
      checks.push_back(check_le("h_study_errors", max_err, 0.0));
    } else if (m.vanishes_on_outer) {
      checks.push_back(check_ge("h_study_slope_h1", s1, 1.0));
      checks.push_back(check_ge("h_study_slope_l2", s2, 1.5));
    }
  }

  if (config.study != "h") {
    // Stokeslet oracle at R = 2a and 4a with the cell size of n = rstudy_n at R = 2a
    const ViscosityField unit = ViscosityField::constant(1.0);
    std::vector<Level> levels;
    for (int k : {1, 2}) {
      const GeometrySpec g{a, 2.0 * k * a, config.rstudy_n * k};
      g.validate();
      levels.push_back(exterior_level(g, unit, "stokeslet-in", config.solver_tol));
      row("R", unit.spec(), levels.back(), kNaN, kNaN);
      std::cout << "convergence: R-study R=" << num(g.R) << " n=" << g.n << " err_probe=" << num(levels.back().err_probe)
                << "\n";
    }
    const double ratio = levels[1].err_probe / levels[0].err_probe;
    Json r;
    r["data"] = "stokeslet-in";
    r["mu"] = unit.spec();
    r["h"] = levels[0].h;
    r["probe_error_ratio"] = ratio;
    report["R_study"] = r;
    checks.push_back(check_le("R_study_probe_error_ratio", ratio, 0.7));
  }

  report["checks"] = checks_json(checks);
  report["all_pass"] = all_pass(checks);
  write_text(dir / "rates.csv", csv.str());
  write_text(dir / "convergence.json", report.dump(2) + "\n");
  print_checks("convergence", checks);
  return all_pass(checks) ? kPass : kCheckFailed;
}

int cmd_infsup(const RunConfig& config) {
  config.validate();
  const std::filesystem::path dir = prepare_out(config);
  const ViscosityField mu = config.viscosity();
  const bool p1p1 = config.element == "p1p1";
  std::vector<int> levels = config.levels;
  if (!config.levels_set) levels = p1p1 ? std::vector<int>{4, 8, 16} : std::vector<int>{4, 8};

  Json rows = Json::array();
  std::vector<double> betas, filtered;
  int spurious = 0;
  for (int n : levels) {
    GeometrySpec g = config.geometry;
    g.n = n;
    const Mesh mesh = build_box_mesh(g);
    const auto spaces = p1p1 ? build_spaces(mesh, 1, PressureSpace::Kind::P1, false)
                             : build_spaces(mesh, 2, PressureSpace::Kind::P0, config.element == "p2b");
    const AssembledForms forms = assemble(mu, *spaces);
    const DiscreteStokes stokes(*spaces, forms.A, forms.B, Domain::Whole, SolveOptions{config.solver_tol});
    const InfSupReport r = estimate_inf_sup(stokes.system());
    Json j;
    j["n"] = n;
    j["h"] = g.h();
    j["beta"] = r.beta;
    j["beta_filtered"] = r.beta_filtered;
    j["spurious_modes"] = r.spurious_modes;
    j["lambda"] = finite_or_null(r.lambda);
    j["a_norm"] = r.a_norm;
    j["stability_constant"] = finite_or_null(std::isfinite(r.lambda) && r.beta > 0.0 ? stability_constant(r) : kNaN);
    j["velocity_dim"] = r.velocity_dim;
    j["pressure_dim"] = r.pressure_dim;
    j["method"] = r.method;
    rows.push_back(j);
    betas.push_back(r.beta);
    filtered.push_back(r.beta_filtered);
    spurious += r.spurious_modes;
    std::cout << "infsup: " << config.element << " n=" << n << " beta=" << num(r.beta)
              << " beta_filtered=" << num(r.beta_filtered) << " spurious=" << r.spurious_modes << "\n";
  }
  const double bmax = *std::max_element(betas.begin(), betas.end());
  const double bmin = *std::min_element(betas.begin(), betas.end());
  const double drift = bmax > 0.0 ? (bmax - bmin) / bmax : kNaN;
  bool decreasing = filtered.size() >= 2;
  for (std::size_t i = 1; i < filtered.size(); ++i) decreasing = decreasing && filtered[i] < filtered[i - 1];
  const bool stable = spurious == 0 && bmin > 0.0 && drift <= 0.3;

  Json report = header("infsup", config);
  report["levels"] = rows;
  report["drift"] = finite_or_null(drift);
  report["beta_filtered_decreasing"] = decreasing;
  report["verdict"] = stable ? "STABLE" : "UNSTABLE";
  std::vector<Check> checks;
  // only the default pair is expected to be stable; p2 and p1p1 are diagnostics
  if (config.element == "p2b") {
    checks.push_back(check_ge("beta_min", bmin, 1e-8));
    checks.push_back(check_le("beta_drift", drift, 0.3));
    checks.push_back(check_eq("spurious_modes", spurious, 0));
  }
  report["checks"] = checks_json(checks);
  report["all_pass"] = all_pass(checks);
  write_text(dir / "infsup.json", report.dump(2) + "\n");
  std::cout << "infsup: " << config.element << " " << (stable ? "STABLE" : "UNSTABLE") << " (drift " << num(drift)
            << ")\n";
  print_checks("infsup", checks);
  return all_pass(checks) ? kPass : kCheckFailed;
}

int run(const std::string& command, const RunConfig& config) {
  try {
    if (command == "verify") return cmd_verify(config);
    if (command == "dirichlet") return cmd_dirichlet(config);
    if (command == "convergence") return cmd_convergence(config);
    if (command == "infsup") return cmd_infsup(config);
    throw ConfigError("unknown command '" + command + "'");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return kConfigError;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    if (!e.residual_history.empty()) {
      std::cerr << "residual history (" << e.residual_history.size() << " entries), last: " << e.residual_history.back()
                << "\n";
    }
    return kSolverFailure;
  } catch (const AssemblyError& e) {
    std::cerr << "assembly failure: " << e.what() << "\n";
    return kSolverFailure;
  }
}

}  // namespace varstokes::cli
