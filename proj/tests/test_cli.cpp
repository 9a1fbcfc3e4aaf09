#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "memdecay/config.hpp"
#include "memdecay/numerics.hpp"
#include "test_util.hpp"

using namespace memdecay;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "memdecay_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(MEMDECAY_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path write_config(const fs::path& dir, const ExperimentConfig& c) {
  const fs::path path = dir / "experiment.ini";
  std::ofstream(path) << serialize_config(c);
  return path;
}

ExperimentConfig small_polynomial_example() {
  ExperimentConfig c = preset_config("paper-example-q3");
  c.operators.modes = 4;
  c.simulation.horizon = 40.0;
  c.bounds.slope_start = 10.0;
  c.bounds.slope_end = 40.0;
  return c;
}

}  // namespace

TEST(Cli, Usage) {
  EXPECT_EQ(cli(""), 1);
  EXPECT_EQ(cli("frobnicate"), 1);
  EXPECT_EQ(cli("check"), 1);
  EXPECT_EQ(cli("check --preset paper-example-q3 --config x.ini"), 1);
  EXPECT_EQ(cli("check --preset unknown"), 1);
  EXPECT_EQ(cli("--help"), 0);
}

TEST(Cli, InitWritesLoadableScaffold) {
  const fs::path dir = scratch("init");
  const fs::path path = dir / "example.ini";
  ASSERT_EQ(cli("init --preset paper-example-q3 --config " + path.string()), 0);
  EXPECT_EQ(load_config(path.string()), preset_config("paper-example-q3"));
  EXPECT_NE(slurp(path).find("; "), std::string::npos);
  EXPECT_EQ(cli("init --config " + path.string()), 2);
}

TEST(Cli, CheckExitCodes) {
  const fs::path dir = scratch("check");
  EXPECT_EQ(cli("check --preset paper-example-q3"), 0);
  EXPECT_EQ(cli("check --preset exponential-oracle"), 0);

  ExperimentConfig heavy = preset_config("paper-example-q3");
  heavy.kernel.amplitude = 2.5;  // g0 = 1.25 > 1/a0 = 1
  EXPECT_EQ(cli("check --config " + write_config(dir, heavy).string()), 3);

  ExperimentConfig coarse = preset_config("paper-example-q3");
  coarse.simulation.dt = 0.1;
  EXPECT_EQ(cli("check --config " + write_config(dir, coarse).string()), 4);

  ExperimentConfig q2 = preset_config("paper-example-q3");
  q2.kernel.exponent = 2.0;
  EXPECT_EQ(cli("check --config " + write_config(dir, q2).string()), 3);

  EXPECT_EQ(cli("check --config " + (dir / "missing.ini").string()), 2);
}

TEST(Cli, RunWritesDeterministicArtifacts) {
  const fs::path dir = scratch("run");
  const fs::path config = write_config(dir, small_polynomial_example());
  ASSERT_EQ(cli("run --config " + config.string() + " --out " + (dir / "a").string()), 0);
  ASSERT_EQ(cli("run --config " + config.string() + " --out " + (dir / "b").string() +
                " --modes-parallel 2"),
            0);
  for (const char* file : {"trajectory.csv", "energy.csv", "verification.csv", "report.txt"}) {
    ASSERT_TRUE(fs::exists(dir / "a" / file)) << file;
    EXPECT_EQ(slurp(dir / "a" / file), slurp(dir / "b" / file)) << file;
  }
  const std::string csv = slurp(dir / "a" / "verification.csv");
  EXPECT_EQ(csv.rfind("family,exponent,Cstar,Cstar_drift,slope,slope_residual,pass\n", 0), 0u);
  EXPECT_EQ(csv.find(",false"), std::string::npos);
}

TEST(Cli, ZeroHistoryPassesTrivially) {
  const fs::path dir = scratch("zero");
  ExperimentConfig c = preset_config("zero-history");
  c.operators.modes = 2;
  c.simulation.horizon = 5.0;
  c.bounds.slope_start = 1.0;
  c.bounds.slope_end = 5.0;
  ASSERT_EQ(cli("run --config " + write_config(dir, c).string() + " --out " + dir.string()), 0);
  EXPECT_NE(slurp(dir / "report.txt").find("zero energy"), std::string::npos);
  const std::string energy = slurp(dir / "energy.csv");
  EXPECT_NE(energy.find("\n0,0,0,0,0,0,0\n"), std::string::npos);
}

TEST(Cli, FitDomainExit) {
  const fs::path dir = scratch("fit");
  ExperimentConfig c = small_polynomial_example();
  c.bounds.fit_start = 100.0;  // beyond the horizon
  EXPECT_EQ(cli("run --config " + write_config(dir, c).string() + " --out " + dir.string()), 6);
}

TEST(Cli, ImprovedBoundUnavailableExit) {
  // Heavy kernel tail with a slowly decaying xi: the first case-1 bound is
  // not integrable.
  const fs::path dir = scratch("improved");
  {
    std::ofstream xi(dir / "xi.csv");
    xi << "t,xi\n";
    for (double t : log_spaced_grid(1e3, 200)) {
      xi << format_double(t) << ',' << format_double(0.5 * std::pow(1.0 + t, -0.4)) << '\n';
    }
  }
  ExperimentConfig c = small_polynomial_example();
  c.kernel.amplitude = 0.25;
  c.kernel.exponent = 1.5;
  c.xi = {"tabulated", 1.0, 1.4, "xi.csv"};
  c.bounds.families = {"thm_case1_improved"};
  const fs::path config = write_config(dir, c);
  ASSERT_EQ(cli("check --config " + config.string()), 0);
  EXPECT_EQ(cli("run --config " + config.string() + " --out " + dir.string()), 7);
}

TEST(Cli, VerificationFailureExit) {
  // With B = I the high modes are barely damped; over [10, 20] the energy is
  // far from the asymptotic rate.
  const fs::path dir = scratch("fail");
  ExperimentConfig c = small_polynomial_example();
  c.operators.b = "identity";
  c.simulation.horizon = 20.0;
  c.bounds.families = {"example_case1"};
  c.bounds.slope_start = 10.0;
  c.bounds.slope_end = 20.0;
  EXPECT_EQ(cli("run --config " + write_config(dir, c).string() + " --out " + dir.string()), 8);
  EXPECT_NE(slurp(dir / "verification.csv").find(",false"), std::string::npos);
}

TEST(Cli, OracleCompare) {
  const fs::path dir = scratch("oracle");
  ASSERT_EQ(cli("oracle-compare --preset exponential-oracle --out " + dir.string()), 0);
  const std::string table = slurp(dir / "convergence.csv");
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 4);
  EXPECT_EQ(slurp(dir / "comparison.csv").rfind("t,u_solver,u_oracle,abs_err,rel_err\n", 0), 0u);
  EXPECT_EQ(cli("oracle-compare --preset paper-example-q3 --out " + dir.string()), 2);
}
