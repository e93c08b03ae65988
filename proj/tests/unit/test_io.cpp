#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stochtame/io.hpp"

using namespace stochtame;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, MinimalDocumentFillsDefaults) {
  const auto c = parse_config("{}");
  EXPECT_EQ(c.model.kind, DriftKind::Burgers1D);
  EXPECT_EQ(c.model.resolution, 64);
  EXPECT_EQ(c.model.effective_cutoff(), 21);
  EXPECT_EQ(c.stepper.scheme, Scheme::TamedEulerMaruyama);
  EXPECT_FALSE(c.control);
  EXPECT_EQ(c.taming_case(), TamingCase::I);
  EXPECT_EQ(serialize_config(c), serialize_config(RunConfig{}));
}

TEST(Config, RoundTripIsIdentity) {
  const std::string text = R"({
    "seed": 17,
    "model": {"kind": "RSW_Inviscid", "resolution": 32, "cutoff": 8, "params": {"f_coriolis": 0.5},
              "ladder": {"s_F0": 1.5}},
    "initial": {"type": "random", "amplitude": 0.2, "background": 1.0, "space": "D"},
    "noise": {"theta": "advisor", "alpha": 1.25, "norm_space": "F1"},
    "stepper": {"dt": 0.002, "t_end": 0.5, "scheme": "TamedRK4EM", "adapt": false},
    "control": {"K": 1.5, "C": 2.0},
    "ensemble": {"n_paths": 10, "d_list": [8, 16], "K_grid": [1, 2, 4], "delta_grid": [0.01, 0.1]},
    "output": {"directory": "out", "save_stride": 5, "formats": ["csv", "jsonl"]}
  })";
  const auto c = parse_config(text);
  EXPECT_TRUE(c.noise.theta_advisor);
  EXPECT_FALSE(c.noise.alpha_advisor);
  EXPECT_EQ(c.taming_case(), TamingCase::II);
  ASSERT_TRUE(c.model.ladder);
  EXPECT_EQ((*c.model.ladder)[1], 1.5);
  const auto s = serialize_config(c);
  EXPECT_EQ(serialize_config(parse_config(s)), s);
  EXPECT_EQ(config_hash(parse_config(s)), config_hash(c));
  auto d = c;
  d.stepper.dt = 0.001;
  EXPECT_NE(config_hash(d), config_hash(c));
}

TEST(Config, UnknownKeyNamesPathAndLine) {
  const std::string text = "{\n  \"model\": {\n    \"params\": {\n      \"nuu\": 0.1\n    }\n  }\n}\n";
  const auto e = error_of(text);
  EXPECT_NE(e.find("/model/params/nuu"), std::string::npos) << e;
  EXPECT_NE(e.find("line 4"), std::string::npos) << e;
  EXPECT_NE(error_of(R"({"extra": 1})").find("unknown key"), std::string::npos);
}

TEST(Config, ParseAndTypeErrorsCarryLocation) {
  const auto e = error_of("{\n\"seed\": 1,\n\"model\": {,}\n}");
  EXPECT_NE(e.find("line 3"), std::string::npos) << e;
  const auto t = error_of("{\n\"stepper\": {\"dt\": \"small\"}\n}");
  EXPECT_NE(t.find("/stepper/dt"), std::string::npos) << t;
  EXPECT_NE(t.find("line 2"), std::string::npos) << t;
  EXPECT_NE(error_of(R"({"noise": {"theta": "lots"}})").find("advisor"), std::string::npos);
  EXPECT_NE(error_of(R"({"model": {"kind": "Stokes"}})").find("/model/kind"), std::string::npos);
}

TEST(Config, CaseInitialSpaceMatrix) {
  // Case II (F1 noise norm) needs D data
  const auto e = error_of(R"({"noise": {"norm_space": "F1"}, "initial": {"space": "F0"}})");
  EXPECT_NE(e.find("Case II"), std::string::npos) << e;
  EXPECT_NE(e.find("requires initial data in D"), std::string::npos) << e;
  EXPECT_NE(error_of(R"({"noise": {"norm_space": "F1"}, "initial": {"space": "F1"}})"), "");
  EXPECT_EQ(error_of(R"({"noise": {"norm_space": "F1"}, "initial": {"space": "D"}})"), "");
  // Case I accepts F0 data
  EXPECT_EQ(error_of(R"({"initial": {"space": "F0"}})"), "");
  EXPECT_NE(error_of(R"({"initial": {"space": "G"}})"), "");
  // incompressible with F0 norm is Case III, which needs F1 data
  const auto v = R"({"model": {"kind": "Vorticity2D", "resolution": 16, "params": {"nu": 0.1}}, "initial": {"space": "F0"}})";
  EXPECT_NE(error_of(v).find("Case III"), std::string::npos);
  EXPECT_EQ(parse_config(R"({"model": {"kind": "Vorticity2D", "resolution": 16, "params": {"nu": 0.1}}})").taming_case(),
            TamingCase::III);
  EXPECT_NE(error_of(R"({"noise": {"norm_space": "D"}})"), "");
}

TEST(Config, CrossFieldChecks) {
  EXPECT_NE(error_of(R"({"model": {"resolution": 32, "cutoff": 11}})").find("/model/cutoff"), std::string::npos);
  EXPECT_EQ(error_of(R"({"model": {"resolution": 32, "cutoff": 10}})"), "");
  EXPECT_NE(error_of(R"({"model": {"resolution": 48}})"), "");
  EXPECT_NE(error_of(R"({"model": {"kind": "RSW_Inviscid", "params": {"nu": 0.1}}})"), "");
  EXPECT_NE(error_of(R"({"model": {"kind": "Burgers1D", "dim": 2}})"), "");
  EXPECT_NE(error_of(R"({"model": {"ladder": {"s_F0": 5}}})"), "");
  EXPECT_NE(error_of(R"({"initial": {"component": 1}})"), "");
  EXPECT_NE(error_of(R"({"control": {"K": -1}})"), "");
  EXPECT_NE(error_of(R"({"output": {"formats": ["xml"]}})"), "");
  EXPECT_NE(error_of(R"({"audit": {"n_samples": 10}})"), "");
  EXPECT_NE(error_of(R"({"stepper": {"dt": 0}})"), "");
  EXPECT_NE(error_of("[]"), "");
}

TEST(Config, SeedPrecedence) {
  RunConfig c;
  c.seed = 5;
  unsetenv(kSeedEnv);
  EXPECT_EQ(resolve_seed(c, std::nullopt), 5u);
  setenv(kSeedEnv, "42", 1);
  EXPECT_EQ(resolve_seed(c, std::nullopt), 42u);
  EXPECT_EQ(resolve_seed(c, 7u), 7u);
  setenv(kSeedEnv, "4x", 1);
  EXPECT_THROW(resolve_seed(c, std::nullopt), ConfigError);
  unsetenv(kSeedEnv);
}

TEST(Config, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
}

TEST(Build, AdvisorFillsTheta) {
  auto c = parse_config(R"({
    "model": {"kind": "Burgers1D", "resolution": 32},
    "noise": {"theta": "advisor", "alpha": "advisor"},
    "stepper": {"t_end": 0.5},
    "audit": {"orbit_probes": 4}
  })");
  const auto n = make_noise(c);
  ASSERT_TRUE(n.audit);
  ASSERT_TRUE(n.advice);
  EXPECT_GT(n.spec.theta, 0.0);
  EXPECT_EQ(n.spec.theta, n.advice->theta);
  EXPECT_EQ(n.spec.alpha, n.advice->alpha);
  EXPECT_EQ(report_value(n.audit->report, "samples"), 100.0 + orbit_probes(c, 4).size());
  c.noise.theta_advisor = c.noise.alpha_advisor = false;
  c.noise.theta = 0.3;
  EXPECT_FALSE(make_noise(c).audit);
  EXPECT_EQ(make_noise(c).spec.theta, 0.3);
}

TEST(Output, JsonlAndFiles) {
  auto c = parse_config(R"({"model": {"kind": "Linear", "resolution": 16, "params": {"nu": 1}},
                            "stepper": {"t_end": 0.1, "dt": 0.01}, "output": {"save_stride": 2}})");
  const auto g = make_grid(c);
  auto r = integrate_path(make_initial(c, g), make_drift(c), std::nullopt, make_stepper(c), c.model.effective_cutoff());
  r.config_hash = config_hash(c);
  std::ostringstream os;
  write_trajectory_jsonl(os, r);
  std::istringstream is(os.str());
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    auto j = nlohmann::json::parse(line);
    if (n == 0) {
      EXPECT_EQ(j.at("config_hash").get<std::uint64_t>(), r.config_hash);
    }
    ++n;
  }
  EXPECT_EQ(n, r.rows.size() + 1);
  EXPECT_EQ(r.rows.size(), 6u);
  const auto dir = std::filesystem::temp_directory_path() / "stochtame_io_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  const auto p = write_file(dir.string(), "t.csv", [&](std::ostream& o) { write_trajectory_csv(o, r); });
  std::ifstream f(p);
  std::getline(f, line);
  EXPECT_EQ(line.rfind("# config_hash=", 0), 0u);
  EXPECT_THROW(write_file("/proc/nonexistent_dir", "x", [](std::ostream&) {}), IoError);
  std::filesystem::remove_all(dir.parent_path());
}
