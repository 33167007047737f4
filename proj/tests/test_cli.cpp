#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "commands.hpp"
#include "varstokes/errors.hpp"

using namespace varstokes;
using namespace varstokes::cli;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("varstokes_cli_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig small(const std::string& name) {
  RunConfig c;
  c.geometry = {1.0, 2.0, 4};
  c.out = scratch(name).string();
  return c;
}

}  // namespace

TEST(RunConfig, DefaultsValidate) {
  RunConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.mu, "two-phase:0.5,2");
  EXPECT_FALSE(c.tol.has_value());
  EXPECT_DOUBLE_EQ(c.tolerance(1e-8), 1e-8);
}

TEST(RunConfig, ApplySettingParsesAndRejects) {
  RunConfig c;
  apply_setting(c, "n", "8");
  apply_setting(c, "R", "3");
  apply_setting(c, "levels", "4,8");
  apply_setting(c, "tol", "1e-6");
  EXPECT_EQ(c.geometry.n, 8);
  EXPECT_DOUBLE_EQ(c.geometry.R, 3.0);
  EXPECT_EQ(c.levels, (std::vector<int>{4, 8}));
  EXPECT_DOUBLE_EQ(c.tolerance(1e-10), 1e-6);
  EXPECT_THROW(apply_setting(c, "colour", "red"), ConfigError);
  EXPECT_THROW(apply_setting(c, "n", "eight"), ConfigError);
  EXPECT_THROW(parse_int_list("levels", "4,,8"), ConfigError);
}

TEST(RunConfig, ValidateNamesTheField) {
  RunConfig c;
  c.mu = "two-phase:0.5";
  try {
    c.validate();
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("mu"), std::string::npos);
  }
  RunConfig d;
  d.method = "guess";
  EXPECT_THROW(d.validate(), ConfigError);
  RunConfig e;
  e.geometry.n = 5;
  EXPECT_THROW(e.validate(), ConfigError);
}

TEST(RunConfig, FileThenFlagsPrecedence) {
  const auto dir = scratch("precedence");
  std::filesystem::create_directories(dir);
  const auto path = dir / "run.cfg";
  std::ofstream(path) << "# comment\nn = 6\nmu=const:2\n\nseed=7\n";
  RunConfig c;
  for (const auto& [k, v] : read_key_values(path.string())) apply_setting(c, k, v);
  apply_setting(c, "n", "8");  // a flag given after the file wins
  EXPECT_EQ(c.geometry.n, 8);
  EXPECT_EQ(c.mu, "const:2");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.data, "curl-bump");  // untouched default
}

TEST(Checks, RelationsAndSlope) {
  EXPECT_TRUE(check_le("x", 1.0, 1.0).pass);
  EXPECT_FALSE(check_le("x", 2.0, 1.0).pass);
  EXPECT_TRUE(check_ge("x", 2.0, 1.0).pass);
  EXPECT_TRUE(check_eq("x", 1.0, 1.0).pass);
  EXPECT_FALSE(check_le("nan", std::nan(""), 1.0).pass);
  EXPECT_NEAR(fitted_slope({1.0, 0.5, 0.25}, {3.0, 0.75, 0.1875}), 2.0, 1e-12);
  EXPECT_TRUE(std::isnan(fitted_slope({1.0}, {1.0})));
}

TEST(Commands, VerifyPassesAndZeroToleranceFails) {
  RunConfig c = small("verify");
  c.samples = 2;
  EXPECT_EQ(run("verify", c), kPass);
  EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(c.out) / "verify.json"));
  c.tol = 0.0;
  EXPECT_EQ(run("verify", c), kCheckFailed);
}

TEST(Commands, ConfigAndPreconditionErrorsExitTwo) {
  RunConfig c = small("errors");
  c.mu = "lava:3";
  EXPECT_EQ(run("dirichlet", c), kConfigError);
  RunConfig r = small("radial");
  r.mu = "const:1";
  r.data = "radial";
  EXPECT_EQ(run("dirichlet", r), kConfigError);
  r.method = "variational";
  EXPECT_EQ(run("dirichlet", r), kPass);
  EXPECT_EQ(run("nonsense", small("unknown")), kConfigError);
}

TEST(Commands, DirichletOutputIsDeterministic) {
  RunConfig c = small("det_a");
  RunConfig d = small("det_b");
  ASSERT_EQ(run("dirichlet", c), kPass);
  ASSERT_EQ(run("dirichlet", d), kPass);
  const std::string a = slurp(std::filesystem::path(c.out) / "solution.csv");
  EXPECT_EQ(a, slurp(std::filesystem::path(d.out) / "solution.csv"));
  EXPECT_EQ(a.substr(0, a.find('\n')), "x,y,z,var_x,var_y,var_z,pot_x,pot_y,pot_z,ref_x,ref_y,ref_z");
  std::size_t rows = 0;
  for (char ch : a) rows += ch == '\n';
  EXPECT_EQ(rows, 28u);
}

TEST(Commands, ZeroDataGivesZeroRows) {
  RunConfig c = small("zero");
  c.data = "zero";
  ASSERT_EQ(run("dirichlet", c), kPass);
  std::istringstream csv(slurp(std::filesystem::path(c.out) / "solution.csv"));
  std::string line;
  std::getline(csv, line);
  while (std::getline(csv, line)) {
    std::stringstream fields(line);
    std::string v;
    for (int k = 0; std::getline(fields, v, ','); ++k) {
      if (k >= 3) EXPECT_EQ(v, "0");
    }
  }
}

TEST(Commands, InfSupFlagsUnstablePair) {
  RunConfig c = small("infsup");
  c.element = "p1p1";
  c.levels = {4};
  c.levels_set = true;
  EXPECT_EQ(run("infsup", c), kPass);
  const std::string json = slurp(std::filesystem::path(c.out) / "infsup.json");
  EXPECT_NE(json.find("UNSTABLE"), std::string::npos);
}
