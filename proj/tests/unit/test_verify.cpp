#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "stochtame/verify.hpp"

using namespace stochtame;
namespace fs = std::filesystem;

namespace {

struct Run {
  int rc = 0;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(STOCHTAME_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  char buf[512];
  while (fgets(buf, sizeof buf, p)) r.out += buf;
  const int st = pclose(p);
  r.rc = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / ("stochtame_verify_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string config_dir() { return std::string(STOCHTAME_SOURCE_DIR) + "/configs"; }

}  // namespace

TEST(Oracles, ClosedForms) {
  EXPECT_NEAR(oracle::Phi(0.0), 0.5, 1e-16);
  EXPECT_NEAR(oracle::Phi(1.959963984540054), 0.975, 1e-15);
  // log f_10 ~ N(-10, 40): P(f_10 < 1e-2) = Phi(0.853) ~ 0.803
  EXPECT_NEAR(oracle::lognormal_below(1.0, 2.0, 1.0, 10.0, 1e-2), 0.80316, 1e-5);
  EXPECT_NEAR(oracle::reflection(1.0, 1.0), 0.31731050786291415, 1e-15);
  EXPECT_EQ(oracle::exponential_tail_bound(0.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(oracle::drifted_sup_survival(1.0, 1.0), std::exp(-1.0));
  // natural scale: a = 0 gives s(x) = x - c
  EXPECT_NEAR(oracle::gbm_scale(0.0, 1.0, 1.0, 3.0), 2.0, 1e-15);
  EXPECT_NEAR(oracle::gbm_scale(0.5, 1.0, 2.0, 4.0), 2.0 * std::log(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(oracle::breaking_time({0.5, -1.0, 0.2}), 1.0);
  EXPECT_TRUE(std::isinf(oracle::breaking_time({0.5, 1.0})));
}

TEST(Oracles, ReflectionDominatedByExponentialBound) {
  for (double x : {0.25, 1.0, 2.0, 3.0})
    for (double y : {0.5, 1.0, 4.0}) EXPECT_LE(oracle::reflection(x, y), oracle::exponential_tail_bound(x, y) * 1.0000001);
}

TEST(Suites, TrivialAndStructuralPass) {
  for (const auto& r : trivial_suite()) EXPECT_TRUE(r.passed) << format_result(r);
  for (const auto& r : structural_suite(config_dir())) EXPECT_TRUE(r.passed) << format_result(r);
}

TEST(Suites, FailuresAreReportedNotThrown) {
  auto r = detail::timed("boom", []() -> CheckResult { throw ConfigError("bad"); });
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.id, "boom");
  EXPECT_NE(r.detail.find("bad"), std::string::npos);
  AcceptanceOptions o;
  o.config_dir = "/nonexistent";
  o.only = {1};
  auto v = acceptance_suite(o);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_FALSE(v[0].passed);
  EXPECT_EQ(format_result(v[0]).rfind("FAIL   AC-1", 0), 0u);
}

TEST(Suites, ShippedConfigsValidate) {
  int n = 0;
  for (const auto& e : fs::directory_iterator(config_dir())) {
    if (e.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_config(e.path().string())) << e.path();
    ++n;
  }
  EXPECT_GE(n, 6);
}

TEST(Cli, SimulateHeatMatchesExactDecay) {
  const auto dir = scratch("heat");
  auto r = cli("simulate --config " + config_dir() + "/heat.json --out " + dir.string() + " --seed 3");
  ASSERT_EQ(r.rc, 0) << r.out;
  std::ifstream f(dir / "trajectory.csv");
  std::string line, last, head;
  std::getline(f, head);
  EXPECT_NE(head.find("seed=3"), std::string::npos);
  const auto hash = config_hash(load_config(config_dir() + "/heat.json"));
  char h[20];
  std::snprintf(h, sizeof h, "%016llx", static_cast<unsigned long long>(hash));
  EXPECT_NE(head.find(h), std::string::npos) << head;
  while (std::getline(f, line)) last = line;
  const double t = std::stod(last.substr(0, last.find(',')));
  const double g = std::stod(last.substr(last.find(',') + 1));
  EXPECT_DOUBLE_EQ(t, 1.0);
  EXPECT_NEAR(g, oracle::heat_decay(std::sqrt(0.5), 1.0), 1e-6);
  EXPECT_TRUE(fs::exists(dir / "trajectory.jsonl"));
  fs::remove_all(dir);
}

TEST(Cli, ErrorsAndExitCodes) {
  auto missing = cli("simulate");
  EXPECT_EQ(missing.rc, 2);
  EXPECT_NE(missing.out.find("--config"), std::string::npos);
  const auto dir = scratch("bad");
  {
    std::ofstream(dir / "bad.json") << "{\n  \"stepper\": {\n    \"dtt\": 0.1\n  }\n}\n";
    std::ofstream(dir / "nocontrol.json") << "{}";
  }
  auto bad = cli("simulate --config " + (dir / "bad.json").string());
  EXPECT_EQ(bad.rc, 2);
  EXPECT_NE(bad.out.find("/stepper/dtt"), std::string::npos) << bad.out;
  EXPECT_NE(bad.out.find("line 3"), std::string::npos) << bad.out;
  auto ctl = cli("control --config " + (dir / "nocontrol.json").string() + " --out " + dir.string());
  EXPECT_EQ(ctl.rc, 2);
  EXPECT_NE(cli("verify --suite nonsense").rc, 0);
  fs::remove_all(dir);
}

TEST(Cli, ControlAndSeedEnvironment) {
  const auto dir = scratch("control");
  {
    std::ofstream(dir / "c.json") << R"({"model": {"kind": "Burgers1D", "resolution": 64, "params": {"nu": 0.02}},
      "noise": {"theta": 1.5, "alpha": 0.5}, "stepper": {"scheme": "TamedRK4EM", "dt": 0.002, "t_end": 0.5},
      "control": {"K": 0.3, "C": 1.0}})";
  }
  setenv(kSeedEnv, "11", 1);
  auto r = cli("control --config " + (dir / "c.json").string() + " --out " + dir.string());
  unsetenv(kSeedEnv);
  ASSERT_EQ(r.rc, 0) << r.out;
  EXPECT_NE(r.out.find("schedule valid"), std::string::npos);
  EXPECT_NE(r.out.find("seed=11"), std::string::npos);
  std::ifstream ev(dir / "events.csv");
  std::string head;
  std::getline(ev, head);
  EXPECT_NE(head.find("seed=11"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, EnsembleWritesReports) {
  const auto dir = scratch("ensemble");
  {
    std::ofstream(dir / "e.json") << R"({"model": {"kind": "Linear", "resolution": 16, "params": {"nu": 1}},
      "noise": {"theta": 0.5, "alpha": 0}, "stepper": {"dt": 0.01, "t_end": 0.5},
      "ensemble": {"n_paths": 3, "d_list": [2, 4], "K_grid": [0.5, 1, 2], "delta_grid": [0.05, 0.1]}})";
  }
  auto r = cli("ensemble --config " + (dir / "e.json").string() + " --out " + dir.string() + " --paths 4 --jobs 2");
  ASSERT_EQ(r.rc, 0) << r.out;
  for (const char* f : {"control_F0.csv", "control_F1int.csv", "control_D.csv", "aldous.csv"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  EXPECT_NE(r.out.find("F0.K="), std::string::npos);
  EXPECT_NE(r.out.find("paths=4"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, ScaleFunctionAndVerify) {
  const auto dir = scratch("scalefn");
  auto r = cli("scalefn --config " + config_dir() + "/gbm.json --out " + dir.string());
  ASSERT_EQ(r.rc, 0) << r.out;
  // a = 1, b = 2: p = 1/2, s(x) = 2 (sqrt x - 1)
  EXPECT_NE(r.out.find("s(4)=2"), std::string::npos) << r.out;
  EXPECT_EQ(cli("verify --suite trivial --quiet").rc, 0);
  fs::remove_all(dir);
}
