#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include "filmheat/config.hpp"
#include "filmheat/snapshot.hpp"

namespace fs = std::filesystem;
using namespace filmheat;

namespace {

const char* kTinyConfig = R"([groups]
re = 15
we = 266
pe = 3
bi = 1

[domain]
kind = periodic
length = 20
nx = 64
perturbation = 0.05

[solver]
models = theta,theta-phi
n_cheb = 16
spinup_time = 5
thermal_time = 3
sample_interval = 0.5
diagnostics_interval = 0.5
snapshot_interval = 2

[sweep]
samples = 3
seed = 5
pe_median = 3
pe_sigma = 0.5
pe_min = 1
pe_max = 10
bi_median = 1
bi_sigma = 1
bi_min = 0.1
bi_max = 10
)";

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("filmheat_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    std::ofstream(dir_ / "tiny.ini") << kTinyConfig;
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) const {
    const std::string cmd = std::string(FILMHEAT_CLI) + " " + args + " > " + (dir_ / "stdout.txt").string() +
                            " 2> " + (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, LinearReproducesExactSpectrum) {
  ASSERT_EQ(run("linear --bih 0 --k 0 --out " + path("lin.tsv")), 0);
  std::ifstream f(path("lin.tsv"));
  const NumericTable t = read_numeric_table(f);
  ASSERT_EQ(t.rows.size(), 1u);
  const double pi = std::numbers::pi;
  EXPECT_NEAR(t.rows[0][t.index("exact2")], -std::pow(1.5 * pi, 2), 1e-10);
  EXPECT_NEAR(t.rows[0][t.index("theta")], -60.0 / 27.0, 1e-14);
  ASSERT_EQ(run("linear --bih 0:10:3 --k 0,0.5"), 0);
  std::istringstream out(slurp(dir_ / "stdout.txt"));
  EXPECT_EQ(read_numeric_table(out).rows.size(), 6u);
}

TEST_F(Cli, UsageErrorsExitWithTwo) {
  EXPECT_EQ(run("linear --bih 1:0:3"), 2);
  EXPECT_EQ(run("linear --bih ''"), 2);
  EXPECT_EQ(run("linear --k x"), 2);
  EXPECT_EQ(run("bogus"), 2);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("simulate --out " + path("r")), 2);
  EXPECT_EQ(run("simulate --config " + path("missing.ini") + " --out " + path("r")), 2);
  std::ofstream(dir_ / "bad.ini") << "[domain]\nnx = 3\n";
  EXPECT_EQ(run("simulate --config " + path("bad.ini") + " --out " + path("r")), 2);
  EXPECT_NE(slurp(dir_ / "stderr.txt").find("domain.nx"), std::string::npos);
  EXPECT_EQ(run("sweep --config " + path("tiny.ini") + " --out " + path("s") + " --reference false"), 2);
  EXPECT_EQ(run("sweep --config " + path("tiny.ini") + " --out " + path("s") + " --workers 0"), 2);
}

TEST_F(Cli, SimulateWritesRunDirectory) {
  ASSERT_EQ(run("simulate --config " + path("tiny.ini") + " --out " + path("run")), 0)
      << slurp(dir_ / "stderr.txt");
  const auto manifest = nlohmann::json::parse(slurp(dir_ / "run" / "manifest.json"));
  EXPECT_EQ(manifest["status"], "completed");
  EXPECT_EQ(manifest["command"], "simulate");
  EXPECT_LT(manifest["result"]["relative_mass_drift"].get<double>(), 1e-8);
  std::ifstream diag(dir_ / "run" / "diagnostics.tsv");
  const NumericTable d = read_numeric_table(diag);
  EXPECT_GE(d.rows.size(), 6u);
  EXPECT_EQ(d.columns[0], "t");
  // snapshots at t = 0+, 2 and the final time 3
  const TemperatureField2D f = load_field_binary(path("run/fourier_0002.bin"));
  EXPECT_NEAR(f.t, 3.0, 1e-12);
  EXPECT_EQ(f.T.rows(), 64);
  EXPECT_EQ(f.T.cols(), 17);
  EXPECT_TRUE(fs::exists(dir_ / "run" / "summary.tsv"));
  // an existing run directory is refused without --force
  EXPECT_EQ(run("simulate --config " + path("tiny.ini") + " --out " + path("run")), 1);
  EXPECT_EQ(run("simulate --config " + path("tiny.ini") + " --out " + path("run") + " --force"), 0);
}

TEST_F(Cli, SweepResumesToIdenticalOutput) {
  const std::string base = "sweep --config " + path("tiny.ini") + " --out ";
  ASSERT_EQ(run(base + path("a") + " --workers 1"), 0) << slurp(dir_ / "stderr.txt");
  const std::string first = slurp(dir_ / "a" / "errormap.tsv");
  EXPECT_EQ(std::count(first.begin(), first.end(), '\n'), 7);
  // remove one finished sample and resume
  fs::remove(dir_ / "a" / "samples" / "00001.tsv");
  ASSERT_EQ(run(base + path("a") + " --workers 1"), 0);
  EXPECT_NE(slurp(dir_ / "stdout.txt").find("1 samples computed, 2 resumed"), std::string::npos)
      << slurp(dir_ / "stdout.txt");
  EXPECT_EQ(slurp(dir_ / "a" / "errormap.tsv"), first);
  // a fresh run on more workers is bit-identical
  ASSERT_EQ(run(base + path("b") + " --workers 3"), 0);
  EXPECT_EQ(slurp(dir_ / "b" / "errormap.tsv"), first);
  // a different configuration in the same directory is refused
  EXPECT_EQ(run(base + path("a") + " --seed 6"), 1);
  const auto manifest = nlohmann::json::parse(slurp(dir_ / "a" / "manifest.json"));
  EXPECT_EQ(manifest["status"], "completed");
  EXPECT_EQ(manifest["regions"]["theta-phi_interface"]["status"], "insufficient_samples");
}

TEST(Configs, ShippedConfigsParse) {
  for (const char* name : {"periodic_reference.ini", "open_hot_inlet.ini", "sweep_desk.ini"}) {
    EXPECT_NO_THROW(load_config(std::string(FILMHEAT_CONFIGS) + "/" + name)) << name;
  }
  const RunConfig s = load_config(std::string(FILMHEAT_CONFIGS) + "/sweep_desk.ini");
  EXPECT_EQ(s.plan.n_samples, 16u);
  EXPECT_EQ(s.plan.dims[0].lo, 1.0);
  EXPECT_EQ(s.plan.dims[0].hi, 300.0);
}
