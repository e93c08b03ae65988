#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stochtame/experiments/reports.hpp"
#include "stochtame/experiments/sde_studies.hpp"
#include "stochtame/io/build.hpp"
#include "stochtame/spectral/fft.hpp"
#include "stochtame/verify/oracles.hpp"
#include "stochtame/verify/structural.hpp"

namespace stochtame {

struct AcceptanceOptions {
  std::string config_dir;
  int jobs = 1;
  std::set<int> only;  ///< empty: all criteria
  std::function<void(const std::string&)> log;
};

namespace detail {

struct AcceptanceContext {
  const AcceptanceOptions& o;
  std::optional<SummaryStats> burgers;

  RunConfig config(const std::string& name) const { return load_config(o.config_dir + "/" + name); }
  void note(const std::string& s) const {
    if (o.log) o.log(s);
  }
};

inline std::string pct(double x) { return fmt("%.3f", x); }

inline CheckResult ac1(AcceptanceContext& cx) {
  const auto c = cx.config("gbm.json");
  const auto r = gbm_study(c.gbm);
  const double oracle = oracle::lognormal_below(c.gbm.spec.a, c.gbm.spec.b, c.gbm.spec.f0, c.gbm.T, c.gbm.decay_level);
  const bool decay_ok = r.decay_fraction >= 0.99;
  const bool order_ok = r.order_at_coarsest >= 0.4 && r.order_at_coarsest <= 0.6;
  std::string d = "decay fraction " + pct(r.decay_fraction) + " (lognormal law " + pct(oracle) + ", need >= 0.99); ";
  d += "tamed order at dt=2^-" + std::to_string(c.gbm.coarsest_level) + " " + fmt("%.2f", r.order_at_coarsest) +
       " (fit " + fmt("%.2f", r.order) + ", need [0.4, 0.6]); plain EM order " + fmt("%.2f", r.em_order);
  return {"", decay_ok && order_ok, d};
}

inline CheckResult ac2(AcceptanceContext&) {
  const ExpLawConfig c;
  const auto r = exp_law_study(c);
  const double want = oracle::drifted_sup_survival(c.epsilon, 1.0);
  const bool ok = std::abs(r.survival_at_1 - want) <= 0.03 && r.ks.p_value >= 0.01;
  return {"", ok,
          "P(E >= 1) " + fmt("%.4f", r.survival_at_1) + " vs " + fmt("%.4f", want) + "; KS D " + fmt("%.4f", r.ks.D) +
              " p " + fmt("%.3f", r.ks.p_value)};
}

inline CheckResult ac3(AcceptanceContext&) {
  const RevuzYorConfig c;
  int above = 0, missed = 0, n = 0;
  for (const auto& cell : revuz_yor_study(c)) {
    ++n;
    above += cell.p.hi <= oracle::exponential_tail_bound(cell.x, cell.y) ? 0 : 1;
    const double ref = oracle::reflection(cell.x, cell.y);
    missed += cell.p.lo <= ref && ref <= cell.p.hi ? 0 : 1;
  }
  return {"", above == 0 && missed == 0,
          std::to_string(n) + " cells: " + std::to_string(above) + " CI upper edges above the bound, " +
              std::to_string(missed) + " reflection values outside the CI"};
}

inline CheckResult ac4(AcceptanceContext& cx) {
  auto c = cx.config("burgers_inviscid.json");
  const auto g = make_grid(c);
  const auto x0 = make_initial(c, g);
  const auto op = make_drift(c);
  const int cutoff = c.model.effective_cutoff();

  auto det = make_stepper(c);
  det.scheme = Scheme::RK4Deterministic;
  const auto r0 = integrate_path(x0, op, std::nullopt, det, cutoff);
  const double t_star = oracle::breaking_time(derivative_physical(x0, 0, 0));
  const bool flagged = r0.blowup && r0.blowup->t >= 0.9 && r0.blowup->t <= 1.1;

  const auto noise = make_noise(c);
  cx.note("AC-4 theta " + fmt("%.4g", noise.spec.theta) + " alpha " + fmt("%.4g", noise.spec.alpha));
  const auto st = make_stepper(c);
  int survived = 0;
  for (int i = 0; i < c.ensemble.n_paths; ++i)
    survived += integrate_path(x0, op, noise.spec, st, cutoff, static_cast<std::uint64_t>(i)).survived() ? 1 : 0;
  const double frac = static_cast<double>(survived) / c.ensemble.n_paths;
  std::string d = "theta=0 flag at t=" + (r0.blowup ? fmt("%.3f", r0.blowup->t) + " (" + r0.blowup->reason + ")" : std::string("none")) +
                  ", characteristics t*=" + fmt("%.3f", t_star) + "; tamed (theta " + fmt("%.3f", noise.spec.theta) +
                  ", alpha " + fmt("%.3f", noise.spec.alpha) + ") " + std::to_string(survived) + "/" +
                  std::to_string(c.ensemble.n_paths) + " reach T=" + fmt("%g", c.stepper.t_end);
  return {"", flagged && frac >= 0.8, d};
}

inline CheckResult ac5(AcceptanceContext& cx) {
  auto c = cx.config("burgers_tamed.json");
  c.ensemble.jobs = cx.o.jobs;
  const auto noise = make_noise(c);
  auto st = run_ensemble(make_ensemble(c, noise.spec, c.seed));
  const auto rep = uniform_control_report(st, c.ensemble.epsilon_target);
  const bool burgers_ok = rep.attained() && rep.first.no_increasing_trend() && rep.second.no_increasing_trend();
  std::string d = "Burgers K1 " + (rep.first.K ? fmt("%g", *rep.first.K) : std::string("not attained")) + " (MK p " +
                  fmt("%.3f", rep.first.trend.p_increasing) + "), K2 " +
                  (rep.second.K ? fmt("%g", *rep.second.K) : std::string("not attained")) + " (MK p " +
                  fmt("%.3f", rep.second.trend.p_increasing) + ")";
  cx.burgers = std::move(st);

  auto rc = cx.config("rsw_case2.json");
  rc.ensemble.jobs = cx.o.jobs;
  const auto rn = make_noise(rc);
  const auto rs = run_ensemble(make_ensemble(rc, rn.spec, rc.seed));
  const auto rrep = d_space_control_report(rs, rc.ensemble.epsilon_target);
  const bool rsw_ok = !rrep.first.per_d.empty();
  d += "; RSW Case II D report " + (rrep.first.K ? "K " + fmt("%g", *rrep.first.K) : std::string("not attained")) +
       " over d in {5, 10}";
  return {"", burgers_ok && rsw_ok, d};
}

inline CheckResult ac6(AcceptanceContext& cx) {
  if (!cx.burgers) {
    auto c = cx.config("burgers_tamed.json");
    c.ensemble.jobs = cx.o.jobs;
    cx.burgers = run_ensemble(make_ensemble(c, make_noise(c).spec, c.seed));
  }
  const auto t = aldous_stats(*cx.burgers, 0.0);
  const auto& deltas = cx.burgers->delta_grid;
  if (deltas.empty()) return {"", false, "no delta grid configured"};
  bool ok = true;
  double worst_hi = 0.0;
  for (int d : cx.burgers->d_list()) {
    std::vector<AldousRow> rows;
    for (const auto& r : t.rows)
      if (r.d == d) rows.push_back(r);
    // smallest window below 0.1 with its CI, and no larger than the largest window
    ok = ok && rows.front().p.hi < 0.1 && rows.front().p.lo <= rows.back().p.hi;
    worst_hi = std::max(worst_hi, rows.front().p.hi);
  }
  return {"", ok,
          "eta " + fmt("%.4f", t.eta) + "; at delta=" + fmt("%g", deltas.front()) + " max CI upper edge over d " +
              fmt("%.4f", worst_hi)};
}

inline CheckResult ac7(AcceptanceContext& cx) {
  const auto v = structural_suite(cx.o.config_dir);
  std::string d;
  for (const auto& r : v) {
    if (!d.empty()) d += "; ";
    d += r.id + (r.passed ? " ok" : " FAIL (" + r.detail + ")");
  }
  return {"", all_passed(v), d};
}

/// Companion control runs on the AC-4 and AC-5 models; every run must pass
/// validate_schedule.
inline CheckResult ac8(AcceptanceContext& cx) {
  int runs = 0, invalid = 0, paired_clean = 0;
  double min_alpha = INFINITY;
  auto tally = [&](const TrajectoryRecord& r, const ControlSchedule& s) {
    ++runs;
    const auto v = validate_schedule(r, s);
    invalid += v.passed ? 0 : 1;
    if (v.dwell_alpha) min_alpha = std::min(min_alpha, *v.dwell_alpha);
    return r.events.size() >= 2 && r.survived();
  };

  auto c = cx.config("burgers_control.json");
  const auto g = make_grid(c);
  const auto x0 = make_initial(c, g);
  const auto op = make_drift(c);
  const auto noise = make_noise(c);
  const auto st = make_stepper(c);
  for (int i = 0; i < c.ensemble.n_paths; ++i)
    paired_clean += tally(control_run(x0, op, noise.spec, *c.control, st, c.model.effective_cutoff(),
                                      static_cast<std::uint64_t>(i)),
                          *c.control)
                        ? 1
                        : 0;
  const int inviscid_runs = runs;

  auto b = cx.config("burgers_tamed.json");
  auto be = make_ensemble(b, make_noise(b).spec, b.seed, true);
  be.n_paths = 20;
  be.K_grid = be.K2_grid = {1.0};
  be.delta_grid.clear();
  be.jobs = cx.o.jobs;
  const auto bs = run_ensemble(be);
  for (int d : bs.d_list())
    for (const auto& p : bs.samples(d)) {
      ++runs;
      invalid += p.schedule_ok.value_or(false) ? 0 : 1;
      if (p.dwell_alpha) min_alpha = std::min(min_alpha, *p.dwell_alpha);
    }
  const bool alpha_ok = std::isfinite(min_alpha) && min_alpha > 0.0;
  return {"", invalid == 0 && alpha_ok,
          std::to_string(runs - invalid) + "/" + std::to_string(runs) + " schedules valid, min dwell alpha " +
              fmt("%.4f", min_alpha) + "; inviscid companion " + std::to_string(paired_clean) + "/" +
              std::to_string(inviscid_runs) + " with a (tau, rho) pair and no blow-up"};
}

}  // namespace detail

inline std::vector<CheckResult> acceptance_suite(const AcceptanceOptions& o) {
  detail::AcceptanceContext cx{o, std::nullopt};
  using Fn = CheckResult (*)(detail::AcceptanceContext&);
  const Fn fns[] = {detail::ac1, detail::ac2, detail::ac3, detail::ac4,
                    detail::ac5, detail::ac6, detail::ac7, detail::ac8};
  std::vector<CheckResult> out;
  for (int k = 1; k <= 8; ++k) {
    if (!o.only.empty() && !o.only.count(k)) continue;
    const std::string id = "AC-" + std::to_string(k);
    out.push_back(detail::timed(id, [&] { return fns[k - 1](cx); }));
    cx.note(format_result(out.back()));
  }
  return out;
}

}  // namespace stochtame
