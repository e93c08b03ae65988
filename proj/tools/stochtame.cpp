// stochtame: command-line driver for tamed SPDE runs, ensembles and checks.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "stochtame/io.hpp"
#include "stochtame/verify/verify.hpp"

#ifndef STOCHTAME_CONFIG_DIR
#define STOCHTAME_CONFIG_DIR "configs"
#endif

using namespace stochtame;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool quiet = false;
};

struct Loaded {
  RunConfig c;
  std::uint64_t seed = 0;
  std::uint64_t hash = 0;
  std::string out;
};

Loaded load(const Common& o) {
  Loaded l;
  l.c = load_config(o.config);
  l.seed = resolve_seed(l.c, o.seed);
  l.hash = config_hash(l.c);
  l.out = o.out.empty() ? l.c.output.directory : o.out;
  return l;
}

bool wants(const RunConfig& c, const std::string& f) {
  for (const auto& x : c.output.formats)
    if (x == f) return true;
  return false;
}

void say(const Common& o, const std::string& s) {
  if (!o.quiet) std::cout << s << "\n";
}

std::string hex(std::uint64_t h) {
  char b[20];
  std::snprintf(b, sizeof b, "%016llx", static_cast<unsigned long long>(h));
  return b;
}

void describe_noise(const Common& o, const NoiseChoice& n) {
  std::string s = "noise theta=" + detail::fmt17(n.spec.theta) + " alpha=" + detail::fmt17(n.spec.alpha) +
                  " case=" + to_string(n.spec.case_label);
  if (n.advice) s += " (advisor: " + n.advice->inequality + ")";
  say(o, s);
}

void save_trajectory(const Loaded& l, const std::string& stem, const TrajectoryRecord& r, const Common& o) {
  if (wants(l.c, "csv"))
    say(o, "wrote " + write_file(l.out, stem + ".csv", [&](std::ostream& f) { write_trajectory_csv(f, r); }).string());
  if (wants(l.c, "jsonl"))
    say(o, "wrote " + write_file(l.out, stem + ".jsonl", [&](std::ostream& f) { write_trajectory_jsonl(f, r); }).string());
}

std::string outcome(const TrajectoryRecord& r) {
  if (r.blowup) return "blow-up at t=" + detail::fmt17(r.blowup->t) + " (" + r.blowup->reason + ")";
  if (r.numeric_failure) return "numeric failure: " + *r.numeric_failure;
  return "reached t=" + detail::fmt17(r.t_final);
}

int cmd_simulate(const Common& o) {
  const auto l = load(o);
  const auto noise = make_noise(l.c);
  describe_noise(o, noise);
  auto r = integrate_path(make_initial(l.c, make_grid(l.c)), make_drift(l.c), noise.spec, make_stepper(l.c),
                          l.c.model.effective_cutoff(), l.seed);
  r.config_hash = l.hash;
  const auto& last = r.rows.back();
  say(o, "config_hash=" + hex(l.hash) + " seed=" + std::to_string(l.seed));
  say(o, outcome(r) + "; final |X|_G=" + detail::fmt17(last.norm_G) + " |X|_F0=" + detail::fmt17(last.norm_F0));
  save_trajectory(l, "trajectory", r, o);
  return 0;
}

int cmd_control(const Common& o) {
  const auto l = load(o);
  if (!l.c.control) throw ConfigError("config " + o.config + ": the control subcommand needs a /control section");
  const auto noise = make_noise(l.c);
  describe_noise(o, noise);
  auto r = control_run(make_initial(l.c, make_grid(l.c)), make_drift(l.c), noise.spec, *l.c.control,
                       make_stepper(l.c), l.c.model.effective_cutoff(), l.seed);
  r.config_hash = l.hash;
  const auto v = validate_schedule(r, *l.c.control);
  say(o, "config_hash=" + hex(l.hash) + " seed=" + std::to_string(l.seed));
  say(o, outcome(r) + "; " + std::to_string(r.events.size()) + " events, L_hi=" +
             detail::fmt17(level_hi(*l.c.control)) + " L_lo=" + detail::fmt17(level_lo(*l.c.control)));
  if (v.dwell_alpha) say(o, "dwell alpha=" + detail::fmt17(*v.dwell_alpha));
  save_trajectory(l, "control_trajectory", r, o);
  say(o, "wrote " + write_file(l.out, "events.csv", [&](std::ostream& f) { write_events_csv(f, r); }).string());
  for (const auto& f : v.failures) std::cerr << "schedule: " << f << "\n";
  std::cout << "schedule " << (v.passed ? "valid" : "INVALID") << "\n";
  return v.passed ? 0 : 1;
}

int cmd_ensemble(const Common& o, int paths, int jobs, bool controlled) {
  auto l = load(o);
  if (paths > 0) l.c.ensemble.n_paths = paths;
  if (jobs > 0) l.c.ensemble.jobs = jobs;
  if (controlled && !l.c.control) throw ConfigError("config " + o.config + ": --controlled needs a /control section");
  l.hash = config_hash(l.c);
  const auto noise = make_noise(l.c);
  describe_noise(o, noise);
  const auto st = run_ensemble(make_ensemble(l.c, noise.spec, l.seed, controlled));
  const auto ds = st.d_list();
  say(o, "config_hash=" + hex(l.hash) + " base_seed=" + std::to_string(l.seed) + " paths=" +
             std::to_string(l.c.ensemble.n_paths));
  for (int d : ds)
    say(o, "d=" + std::to_string(d) + " blowups=" + std::to_string(st.count(d, &PathSample::blowup)) +
               " numeric_failures=" + std::to_string(st.count(d, &PathSample::numeric_failure)));
  write_file(l.out, "control_F0.csv", [&](std::ostream& f) { write_control_csv(f, st, false, l.hash, l.seed); });
  write_file(l.out, "control_F1int.csv", [&](std::ostream& f) { write_control_csv(f, st, true, l.hash, l.seed); });
  write_file(l.out, "control_D.csv", [&](std::ostream& f) { write_d_control_csv(f, st, l.hash, l.seed); });
  if (ds.size() >= 2) {
    const auto rep = uniform_control_report(st, l.c.ensemble.epsilon_target);
    const auto drep = d_space_control_report(st, l.c.ensemble.epsilon_target);
    if (!o.quiet) {
      write_report(std::cout, "F0", rep.first, rep.d_list);
      write_report(std::cout, "F1int", rep.second, rep.d_list);
      write_report(std::cout, "D", drep.first, drep.d_list);
    }
  }
  if (!st.delta_grid.empty()) {
    const auto t = aldous_stats(st, 0.0);
    write_file(l.out, "aldous.csv", [&](std::ostream& f) { write_aldous_csv(f, t, l.hash, l.seed); });
  }
  if (controlled) {
    std::size_t bad = 0;
    for (int d : ds)
      for (const auto& p : st.samples(d)) bad += p.schedule_ok.value_or(false) ? 0 : 1;
    std::cout << "schedules invalid: " << bad << "\n";
    if (bad) return 1;
  }
  say(o, "wrote reports to " + l.out);
  return 0;
}

int cmd_audit(const Common& o) {
  auto l = load(o);
  l.c.noise.theta_advisor = true;
  const auto n = make_noise(l.c);
  const auto& k = n.audit->constants;
  write_file(l.out, "audit.csv", [&](std::ostream& f) {
    write_provenance(f, l.hash, l.seed);
    f << "key,value\n";
    for (const auto& [key, v] : n.audit->report) f << key << ',' << detail::fmt17(v) << "\n";
  });
  if (!o.quiet) {
    for (const auto& [key, v] : n.audit->report) std::cout << key << "=" << detail::fmt17(v) << "\n";
    std::cout << "argmax_C1=" << n.audit->argmax_C1 << "\n";
    std::cout << "interpolation_violations=" << n.audit->interpolation_violations << "\n";
  }
  std::cout << "C1=" << detail::fmt17(k.C1) << " gamma1=" << detail::fmt17(k.gamma1) << " case "
            << to_string(n.spec.case_label) << " -> theta=" << detail::fmt17(n.advice->theta)
            << " alpha=" << detail::fmt17(n.advice->alpha) << "\n";
  return n.audit->interpolation_violations == 0 ? 0 : 1;
}

int cmd_gbm(const Common& o) {
  const auto l = load(o);
  auto g = l.c.gbm;
  if (o.seed) g.seed = l.seed;
  const auto r = gbm_study(g);
  std::cout << "decay_fraction=" << detail::fmt17(r.decay_fraction) << " oracle=" << detail::fmt17(r.decay_oracle)
            << " criterion(b^2>2a)=" << (gbm_decay_criterion(g.spec) ? "true" : "false") << "\n";
  std::cout << "tamed_order=" << detail::fmt17(r.order) << " at_coarsest=" << detail::fmt17(r.order_at_coarsest)
            << " em_order=" << detail::fmt17(r.em_order) << "\n";
  write_file(l.out, "gbm_strong_errors.csv", [&](std::ostream& f) {
    write_provenance(f, l.hash, g.seed);
    f << "dt,tamed_error,em_error\n";
    for (std::size_t i = 0; i < r.dts.size(); ++i)
      f << detail::fmt17(r.dts[i]) << ',' << detail::fmt17(r.strong_errors[i]) << ','
        << detail::fmt17(r.em_errors[i]) << "\n";
  });
  return 0;
}

int cmd_scalefn(const Common& o) {
  const auto l = load(o);
  const auto& s = l.c.gbm.spec;
  ScaleFunctionSpec spec{[a = s.a](double y) { return a * y; }, [b = s.b](double y) { return b * y; }, l.c.scalefn.c};
  write_file(l.out, "scale_function.csv", [&](std::ostream& f) {
    write_provenance(f, l.hash, l.seed);
    f << "x,s\n";
    for (double x : l.c.scalefn.points) {
      const double v = scale_function(spec, x);
      f << detail::fmt17(x) << ',' << detail::fmt17(v) << "\n";
      say(o, "s(" + detail::fmt17(x) + ")=" + detail::fmt17(v));
    }
  });
  return 0;
}

int cmd_verify(const std::string& suite, const std::string& config_dir, int jobs, bool quiet, const std::vector<int>& only) {
  std::vector<CheckResult> v;
  if (suite == "trivial") {
    v = trivial_suite();
  } else if (suite == "structural") {
    v = structural_suite(config_dir);
  } else {
    AcceptanceOptions a;
    a.config_dir = config_dir;
    a.jobs = jobs;
    a.only = {only.begin(), only.end()};
    v = acceptance_suite(a);
  }
  for (const auto& r : v)
    if (!quiet || !r.passed) std::cout << format_result(r) << "\n";
  const bool ok = all_passed(v);
  std::cout << suite << ": " << (ok ? "all passed" : "FAILED") << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochtame: tamed stochastic PDE solver"};
  app.require_subcommand(1);
  Common o;
  int paths = 0, jobs = 0;
  bool controlled = false;

  auto add_common = [&](CLI::App* s) {
    s->add_option("--config", o.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    s->add_option("--seed", o.seed, "seed (overrides STOCHTAME_SEED and the config)");
    s->add_option("--out", o.out, "output directory (default: output.directory)");
    s->add_flag("--quiet", o.quiet, "print only the summary line");
  };
  auto* sim = app.add_subcommand("simulate", "one path of the configured SPDE");
  auto* ctl = app.add_subcommand("control", "one controlled path with schedule validation");
  auto* ens = app.add_subcommand("ensemble", "Monte Carlo ensemble over the cutoff list");
  auto* aud = app.add_subcommand("audit", "assumption audit and theta advice");
  auto* gbm = app.add_subcommand("gbm", "scalar GBM stabilization and strong-error study");
  auto* sfn = app.add_subcommand("scalefn", "scale function of the configured GBM");
  for (auto* s : {sim, ctl, ens, aud, gbm, sfn}) add_common(s);
  ens->add_option("--paths", paths, "override ensemble.n_paths")->check(CLI::PositiveNumber);
  ens->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  ens->add_flag("--controlled", controlled, "apply the /control schedule to every path");

  auto* ver = app.add_subcommand("verify", "built-in check suites");
  std::string suite = "trivial", config_dir = STOCHTAME_CONFIG_DIR;
  std::vector<int> only;
  int vjobs = 1;
  bool vquiet = false;
  ver->add_option("--suite", suite, "trivial | structural | acceptance")
      ->check(CLI::IsMember({"trivial", "structural", "acceptance"}));
  ver->add_option("--config-dir", config_dir, "directory holding the reference configs");
  ver->add_option("--criteria", only, "acceptance criteria to run (1-8)")->check(CLI::Range(1, 8));
  ver->add_option("--jobs", vjobs, "worker threads")->check(CLI::PositiveNumber);
  ver->add_flag("--quiet", vquiet, "print failures only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*sim) return cmd_simulate(o);
    if (*ctl) return cmd_control(o);
    if (*ens) return cmd_ensemble(o, paths, jobs, controlled);
    if (*aud) return cmd_audit(o);
    if (*gbm) return cmd_gbm(o);
    if (*sfn) return cmd_scalefn(o);
    if (*ver) return cmd_verify(suite, config_dir, vjobs, vquiet, only);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
