#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stochtame/control/control.hpp"
#include "stochtame/experiments/initial.hpp"
#include "stochtame/experiments/sde_studies.hpp"
#include "stochtame/models/drift_operator.hpp"
#include "stochtame/noise/noise.hpp"

namespace stochtame {

inline constexpr const char* kSeedEnv = "STOCHTAME_SEED";

struct ModelSection {
  DriftKind kind = DriftKind::Burgers1D;
  ModelParams params;
  int resolution = 64;
  int cutoff = 0;  ///< 0: n/3
  int dim = 0;     ///< 0: the model's own dimension (1 for Linear)
  std::optional<std::array<double, 4>> ladder;  ///< G, F0, F1, D exponents

  int grid_dim() const {
    if (dim > 0) return dim;
    const int d = kind_dim(kind);
    return d > 0 ? d : 1;
  }
  int effective_cutoff() const { return cutoff > 0 ? cutoff : resolution / 3; }
};

struct NoiseSection {
  double theta = 0.0;
  double alpha = 0.0;
  bool theta_advisor = false;  ///< "advisor": theta from the audited constants
  bool alpha_advisor = false;
  LadderSpace norm_space = LadderSpace::F0;
  double advisor_epsilon = 0.25;
  double advisor_margin = 0.05;
};

struct EnsembleSection {
  int n_paths = 100;
  std::vector<int> d_list{8, 16, 32, 64};
  std::vector<double> K_grid;
  std::vector<double> K2_grid;
  std::vector<double> delta_grid;
  double aldous_level = 0.0;
  double aldous_eta = 0.0;
  double epsilon_target = 0.1;
  int jobs = 1;
};

struct AuditSection {
  int n_samples = 100;
  std::vector<double> amplitudes{0.25, 0.5, 1.0, 2.0, 4.0};
  double decay = 3.0;
  std::uint64_t seed = 1;
  int orbit_probes = 0;  ///< states sampled along the deterministic orbit of the initial datum
};

struct ScaleFnSection {
  std::vector<double> points{0.5, 1.0, 2.0, 4.0};
  double c = 1.0;
};

struct OutputSection {
  std::string directory = ".";
  int save_stride = 1;
  std::vector<std::string> formats{"csv"};  ///< csv | jsonl
};

struct RunConfig {
  std::uint64_t seed = 0;
  ModelSection model;
  InitialCondition initial;
  LadderSpace initial_space = LadderSpace::D;  ///< declared regularity of the initial datum
  NoiseSection noise;
  StepperConfig stepper;
  std::optional<ControlSchedule> control;
  EnsembleSection ensemble;
  AuditSection audit;
  GbmStudyConfig gbm;
  ScaleFnSection scalefn;
  OutputSection output;

  bool incompressible() const {
    return model.kind == DriftKind::Vorticity2D || model.kind == DriftKind::Vorticity3D;
  }
  TamingCase taming_case() const { return derive_case(noise.norm_space, incompressible()); }
};

namespace detail {

using nlohmann::json;

inline int line_of(const std::string& text, std::size_t pos) {
  int line = 1;
  for (std::size_t i = 0; i < pos && i < text.size(); ++i) line += text[i] == '\n' ? 1 : 0;
  return line;
}

/// Line of the first `"key":`; 0 when not found.
inline int key_line(const std::string& text, const std::string& key) {
  const std::string q = "\"" + key + "\"";
  for (std::size_t p = text.find(q); p != std::string::npos; p = text.find(q, p + 1)) {
    std::size_t e = p + q.size();
    while (e < text.size() && std::isspace(static_cast<unsigned char>(text[e]))) ++e;
    if (e < text.size() && text[e] == ':') return line_of(text, p);
  }
  return 0;
}

/// Object reader that remembers which keys were consumed.
class Section {
 public:
  Section(const json& j, std::string path, const std::string& text) : j_(j), path_(std::move(path)), text_(text) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  bool has(const std::string& k) const { return j_.contains(k); }

  template <class T>
  void get(const std::string& k, T& out) {
    if (!j_.contains(k)) return;
    seen_.insert(k);
    try {
      out = j_.at(k).get<T>();
    } catch (const nlohmann::json::exception& e) {
      fail(path_ + "/" + k, std::string("wrong type (") + e.what() + ")");
    }
  }

  const json* raw(const std::string& k) {
    if (!j_.contains(k)) return nullptr;
    seen_.insert(k);
    return &j_.at(k);
  }

  Section sub(const std::string& k) {
    seen_.insert(k);
    return Section(j_.at(k), path_ + "/" + k, text_);
  }

  [[noreturn]] void fail(const std::string& where, const std::string& what) const {
    const auto slash = where.find_last_of('/');
    const int line = key_line(text_, where.substr(slash + 1));
    std::string msg = "config " + (where.empty() ? std::string("/") : where);
    if (line > 0) msg += " (line " + std::to_string(line) + ")";
    throw ConfigError(msg + ": " + what);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(path_ + "/" + it.key(), "unknown key");
  }

  const std::string& path() const { return path_; }

 private:
  const json& j_;
  std::string path_;
  const std::string& text_;
  std::set<std::string> seen_;
};

/// Number or the string "advisor".
inline void number_or_advisor(Section& s, const std::string& k, double& v, bool& advisor) {
  const json* r = s.raw(k);
  if (!r) return;
  if (r->is_string() && r->get<std::string>() == "advisor") {
    advisor = true;
    return;
  }
  if (!r->is_number()) s.fail(s.path() + "/" + k, "expected a number or \"advisor\"");
  advisor = false;
  v = r->get<double>();
}

inline int rank(LadderSpace s) { return static_cast<int>(s); }

}  // namespace detail

/// Cross-field checks that need more than one section.
inline void validate_config(const RunConfig& c) {
  const auto& m = c.model;
  if (m.resolution < 4 || (m.resolution & (m.resolution - 1)) != 0)
    throw ConfigError("config /model/resolution: must be a power of two >= 4");
  if (m.cutoff < 0) throw ConfigError("config /model/cutoff: must be >= 0");
  if (m.effective_cutoff() < 1) throw ConfigError("config /model/cutoff: resolution too small for any mode");
  if (m.effective_cutoff() > m.resolution / 3)
    throw ConfigError("config /model/cutoff: " + std::to_string(m.cutoff) + " exceeds the dealiased band n/3 = " +
                      std::to_string(m.resolution / 3) + " of resolution " + std::to_string(m.resolution));
  const int kd = kind_dim(m.kind);
  if (m.dim != 0 && kd != 0 && m.dim != kd) throw ConfigError("config /model/dim: conflicts with the model kind");
  if (m.dim < 0 || m.dim > 3) throw ConfigError("config /model/dim: must be 0..3");
  if (m.ladder) {
    const auto& e = *m.ladder;
    SpaceLadder::from_exponents(e[0], e[1], e[2], e[3]).validate();
  }
  DriftOperator::make(m.kind, m.params);
  if (c.noise.norm_space != LadderSpace::F0 && c.noise.norm_space != LadderSpace::F1)
    throw ConfigError("config /noise/norm_space: must be F0 or F1");
  const TamingCase tc = c.taming_case();
  const LadderSpace need = required_initial_space(tc);
  if (detail::rank(c.initial_space) < detail::rank(need))
    throw ConfigError(std::string("config /initial/space: Case ") + to_string(tc) + " requires initial data in " +
                      to_string(need) + ", declared only in " + to_string(c.initial_space));
  if (!c.noise.theta_advisor && !(c.noise.theta >= 0.0)) throw ConfigError("config /noise/theta: must be >= 0");
  if (!c.noise.alpha_advisor && !(c.noise.alpha >= 0.0)) throw ConfigError("config /noise/alpha: must be >= 0");
  if (c.noise.theta_advisor && !(c.noise.advisor_epsilon > 0.0 && c.noise.advisor_epsilon < 0.5))
    throw ConfigError("config /noise/advisor_epsilon: must lie in (0, 1/2)");
  c.initial.validate();
  if (c.initial.component >= kind_components(m.kind)) throw ConfigError("config /initial/component: out of range");
  c.stepper.validate();
  if (c.control) c.control->validate();
  const auto& e = c.ensemble;
  if (e.n_paths < 1) throw ConfigError("config /ensemble/n_paths: must be >= 1");
  if (e.jobs < 1) throw ConfigError("config /ensemble/jobs: must be >= 1");
  if (!(e.epsilon_target > 0.0 && e.epsilon_target < 1.0))
    throw ConfigError("config /ensemble/epsilon_target: must lie in (0, 1)");
  if (c.audit.n_samples < 100) throw ConfigError("config /audit/n_samples: must be >= 100");
  if (c.audit.orbit_probes < 0) throw ConfigError("config /audit/orbit_probes: must be >= 0");
  if (c.output.save_stride < 1) throw ConfigError("config /output/save_stride: must be >= 1");
  for (const auto& f : c.output.formats)
    if (f != "csv" && f != "jsonl") throw ConfigError("config /output/formats: unknown format '" + f + "'");
  if (c.gbm.n_paths < 1 || !(c.gbm.T > 0.0) || c.gbm.coarsest_level >= c.gbm.finest_level)
    throw ConfigError("config /gbm: need n_paths >= 1, T > 0 and coarsest_level < finest_level");
}

inline RunConfig parse_config(const std::string& text) {
  using detail::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error (line " + std::to_string(detail::line_of(text, e.byte)) + "): " + e.what());
  }
  RunConfig c;
  detail::Section root(j, "", text);
  root.get("seed", c.seed);

  if (root.has("model")) {
    auto s = root.sub("model");
    std::string kind = to_string(c.model.kind);
    s.get("kind", kind);
    try {
      c.model.kind = drift_kind_from_string(kind);
    } catch (const ConfigError& e) {
      s.fail("/model/kind", e.what());
    }
    s.get("resolution", c.model.resolution);
    s.get("cutoff", c.model.cutoff);
    s.get("dim", c.model.dim);
    if (s.has("params")) {
      auto p = s.sub("params");
      auto& mp = c.model.params;
      p.get("nu", mp.nu);
      p.get("nu_h", mp.nu_h);
      p.get("linear_rate", mp.linear_rate);
      p.get("f_coriolis", mp.f_coriolis);
      p.get("rossby", mp.rossby);
      p.get("froude", mp.froude);
      p.get("epsilon_sobolev", mp.epsilon_sobolev);
      p.finish();
    }
    if (s.has("ladder")) {
      auto l = s.sub("ladder");
      const auto d = default_ladder(c.model.kind, c.model.params);
      std::array<double, 4> e{d.s_G, d.s_F0, d.s_F1, d.s_D};
      l.get("s_G", e[0]);
      l.get("s_F0", e[1]);
      l.get("s_F1", e[2]);
      l.get("s_D", e[3]);
      l.finish();
      c.model.ladder = e;
    }
    s.finish();
  }

  if (root.has("initial")) {
    auto s = root.sub("initial");
    auto& ic = c.initial;
    s.get("type", ic.type);
    s.get("amplitude", ic.amplitude);
    s.get("mode", ic.mode);
    s.get("component", ic.component);
    s.get("decay", ic.decay);
    s.get("max_mode", ic.max_mode);
    s.get("seed", ic.seed);
    s.get("background", ic.background);
    std::string space = to_string(c.initial_space);
    s.get("space", space);
    try {
      c.initial_space = ladder_space_from_string(space);
    } catch (const ConfigError& e) {
      s.fail("/initial/space", e.what());
    }
    s.finish();
  }

  if (root.has("noise")) {
    auto s = root.sub("noise");
    detail::number_or_advisor(s, "theta", c.noise.theta, c.noise.theta_advisor);
    detail::number_or_advisor(s, "alpha", c.noise.alpha, c.noise.alpha_advisor);
    std::string ns = to_string(c.noise.norm_space);
    s.get("norm_space", ns);
    try {
      c.noise.norm_space = ladder_space_from_string(ns);
    } catch (const ConfigError& e) {
      s.fail("/noise/norm_space", e.what());
    }
    s.get("advisor_epsilon", c.noise.advisor_epsilon);
    s.get("advisor_margin", c.noise.advisor_margin);
    s.finish();
  }

  if (root.has("stepper")) {
    auto s = root.sub("stepper");
    auto& st = c.stepper;
    std::string scheme = to_string(st.scheme);
    s.get("scheme", scheme);
    try {
      st.scheme = scheme_from_string(scheme);
    } catch (const ConfigError& e) {
      s.fail("/stepper/scheme", e.what());
    }
    s.get("dt", st.dt);
    s.get("dt_min", st.dt_min);
    s.get("adapt", st.adapt);
    s.get("adapt_trigger", st.adapt_trigger);
    s.get("blowup_threshold", st.blowup_threshold);
    s.get("resolution_tol", st.resolution_tol);
    s.get("t_end", st.t_end);
    s.get("epsilon", st.epsilon);
    s.finish();
  }

  if (root.has("control")) {
    const auto* r = root.raw("control");
    if (!r->is_null()) {
      detail::Section s(*r, "/control", text);
      ControlSchedule cs;
      s.get("K", cs.K);
      s.get("C", cs.C);
      s.get("max_stochastic_duration", cs.max_stochastic_duration);
      s.finish();
      c.control = cs;
    }
  }

  if (root.has("ensemble")) {
    auto s = root.sub("ensemble");
    auto& e = c.ensemble;
    s.get("n_paths", e.n_paths);
    s.get("d_list", e.d_list);
    s.get("K_grid", e.K_grid);
    s.get("K2_grid", e.K2_grid);
    s.get("delta_grid", e.delta_grid);
    s.get("aldous_level", e.aldous_level);
    s.get("aldous_eta", e.aldous_eta);
    s.get("epsilon_target", e.epsilon_target);
    s.get("jobs", e.jobs);
    s.finish();
  }

  if (root.has("audit")) {
    auto s = root.sub("audit");
    auto& a = c.audit;
    s.get("n_samples", a.n_samples);
    s.get("amplitudes", a.amplitudes);
    s.get("decay", a.decay);
    s.get("seed", a.seed);
    s.get("orbit_probes", a.orbit_probes);
    s.finish();
  }

  if (root.has("gbm")) {
    auto s = root.sub("gbm");
    auto& g = c.gbm;
    s.get("a", g.spec.a);
    s.get("b", g.spec.b);
    s.get("f0", g.spec.f0);
    s.get("T", g.T);
    s.get("n_paths", g.n_paths);
    s.get("decay_level", g.decay_level);
    s.get("coarsest_level", g.coarsest_level);
    s.get("finest_level", g.finest_level);
    s.get("seed", g.seed);
    s.finish();
  }

  if (root.has("scalefn")) {
    auto s = root.sub("scalefn");
    s.get("points", c.scalefn.points);
    s.get("c", c.scalefn.c);
    s.finish();
  }

  if (root.has("output")) {
    auto s = root.sub("output");
    s.get("directory", c.output.directory);
    s.get("save_stride", c.output.save_stride);
    s.get("formats", c.output.formats);
    s.finish();
  }
  root.finish();
  c.stepper.save_stride = c.output.save_stride;
  validate_config(c);
  return c;
}

inline nlohmann::json to_json(const RunConfig& c) {
  using nlohmann::json;
  json j;
  j["seed"] = c.seed;
  const auto& mp = c.model.params;
  json m{{"kind", to_string(c.model.kind)},
         {"resolution", c.model.resolution},
         {"cutoff", c.model.cutoff},
         {"dim", c.model.dim},
         {"params",
          {{"nu", mp.nu},
           {"nu_h", mp.nu_h},
           {"linear_rate", mp.linear_rate},
           {"f_coriolis", mp.f_coriolis},
           {"rossby", mp.rossby},
           {"froude", mp.froude},
           {"epsilon_sobolev", mp.epsilon_sobolev}}}};
  if (c.model.ladder) {
    const auto& e = *c.model.ladder;
    m["ladder"] = {{"s_G", e[0]}, {"s_F0", e[1]}, {"s_F1", e[2]}, {"s_D", e[3]}};
  }
  j["model"] = m;
  const auto& ic = c.initial;
  j["initial"] = {{"type", ic.type},         {"amplitude", ic.amplitude}, {"mode", ic.mode},
                  {"component", ic.component}, {"decay", ic.decay},       {"max_mode", ic.max_mode},
                  {"seed", ic.seed},           {"background", ic.background}, {"space", to_string(c.initial_space)}};
  j["noise"] = {{"theta", c.noise.theta_advisor ? json("advisor") : json(c.noise.theta)},
                {"alpha", c.noise.alpha_advisor ? json("advisor") : json(c.noise.alpha)},
                {"norm_space", to_string(c.noise.norm_space)},
                {"advisor_epsilon", c.noise.advisor_epsilon},
                {"advisor_margin", c.noise.advisor_margin}};
  const auto& st = c.stepper;
  j["stepper"] = {{"scheme", to_string(st.scheme)},
                  {"dt", st.dt},
                  {"dt_min", st.dt_min},
                  {"adapt", st.adapt},
                  {"adapt_trigger", st.adapt_trigger},
                  {"blowup_threshold", st.blowup_threshold},
                  {"resolution_tol", st.resolution_tol},
                  {"t_end", st.t_end},
                  {"epsilon", st.epsilon}};
  j["control"] = c.control ? json{{"K", c.control->K},
                                  {"C", c.control->C},
                                  {"max_stochastic_duration", c.control->max_stochastic_duration}}
                           : json(nullptr);
  const auto& e = c.ensemble;
  j["ensemble"] = {{"n_paths", e.n_paths},       {"d_list", e.d_list},           {"K_grid", e.K_grid},
                   {"K2_grid", e.K2_grid},       {"delta_grid", e.delta_grid},   {"aldous_level", e.aldous_level},
                   {"aldous_eta", e.aldous_eta}, {"epsilon_target", e.epsilon_target}, {"jobs", e.jobs}};
  const auto& a = c.audit;
  j["audit"] = {{"n_samples", a.n_samples},
                {"amplitudes", a.amplitudes},
                {"decay", a.decay},
                {"seed", a.seed},
                {"orbit_probes", a.orbit_probes}};
  const auto& g = c.gbm;
  j["gbm"] = {{"a", g.spec.a},
              {"b", g.spec.b},
              {"f0", g.spec.f0},
              {"T", g.T},
              {"n_paths", g.n_paths},
              {"decay_level", g.decay_level},
              {"coarsest_level", g.coarsest_level},
              {"finest_level", g.finest_level},
              {"seed", g.seed}};
  j["scalefn"] = {{"points", c.scalefn.points}, {"c", c.scalefn.c}};
  j["output"] = {
      {"directory", c.output.directory}, {"save_stride", c.output.save_stride}, {"formats", c.output.formats}};
  return j;
}

inline std::string serialize_config(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

/// FNV-1a over the canonical serialization.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t config_hash(const RunConfig& c) { return fnv1a(to_json(c).dump()); }

/// Flag beats STOCHTAME_SEED beats the config value.
inline std::uint64_t resolve_seed(const RunConfig& c, std::optional<std::uint64_t> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv(kSeedEnv); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0') throw ConfigError(std::string(kSeedEnv) + ": not an unsigned integer: '" + env + "'");
    return v;
  }
  return c.seed;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace stochtame
