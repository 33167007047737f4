#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "varstokes/errors.hpp"

using varstokes::cli::RunConfig;

int main(int argc, char** argv) {
  CLI::App app{"Variable-viscosity Stokes potentials and exterior Dirichlet solver"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out, mu, method, data, levels, element, study;
  double a = 0.0, R = 0.0, tol = 0.0;
  int n = 0, samples = 0;
  long long seed = 0;
  bool p1p1 = false, write_mesh = false;

  app.add_option("--config", config_path, "key=value file; flags override it");
  auto* o_out = app.add_option("--out", out, "output directory");
  auto* o_n = app.add_option("--n", n, "cells per axis");
  auto* o_R = app.add_option("--R", R, "half-width of the truncation box");
  auto* o_a = app.add_option("--a", a, "half-width of the inner cube");
  auto* o_mu = app.add_option("--mu", mu, "viscosity: const:c | two-phase:cp,cm | checkerboard:c1,c2,p");
  auto* o_tol = app.add_option("--tol", tol, "replaces every residual tolerance");
  auto* o_seed = app.add_option("--seed", seed, "random seed");
  auto* o_method = app.add_option("--method", method, "variational | potential | both");
  auto* o_data = app.add_option("--data", data, "manufactured case: zero | curl-bump | stokeslet-in | radial");
  auto* o_levels = app.add_option("--levels", levels, "comma-separated n values");
  auto* o_samples = app.add_option("--samples", samples, "random densities in verify");
  auto* o_element = app.add_option("--element", element, "p2b | p2 | p1p1 (infsup)");
  auto* o_study = app.add_option("--study", study, "h | R | both (convergence)");
  app.add_flag("--p1p1", p1p1, "shorthand for --element p1p1");
  app.add_flag("--write-mesh", write_mesh, "also write mesh.txt");

  app.add_subcommand("verify", "identity suite for the potentials and the boundary operator");
  app.add_subcommand("dirichlet", "exterior Dirichlet problem by both methods");
  app.add_subcommand("convergence", "manufactured h-study and Stokeslet R-study");
  app.add_subcommand("infsup", "discrete inf-sup constants across levels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return varstokes::cli::kConfigError;
  }

  RunConfig config;
  try {
    if (!config_path.empty()) {
      for (const auto& [k, v] : varstokes::cli::read_key_values(config_path)) varstokes::cli::apply_setting(config, k, v);
    }
    auto set = [&config](CLI::Option* opt, const std::string& key) {
      if (opt->count() > 0) varstokes::cli::apply_setting(config, key, opt->as<std::string>());
    };
    set(o_out, "out");
    set(o_n, "n");
    set(o_R, "R");
    set(o_a, "a");
    set(o_mu, "mu");
    set(o_tol, "tol");
    set(o_seed, "seed");
    set(o_method, "method");
    set(o_data, "data");
    set(o_levels, "levels");
    set(o_samples, "samples");
    set(o_element, "element");
    set(o_study, "study");
    if (p1p1) config.element = "p1p1";
    if (write_mesh) config.write_mesh = true;
  } catch (const varstokes::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return varstokes::cli::kConfigError;
  }
  return varstokes::cli::run(app.get_subcommands().front()->get_name(), config);
}
