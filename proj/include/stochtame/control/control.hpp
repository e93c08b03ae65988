#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "stochtame/core/errors.hpp"
#include "stochtame/integrators/path_runner.hpp"

namespace stochtame {

/// Switching levels on m = ||X||_F0 through phi(m) = log(C + m^2):
/// noise switches on at phi = 2K and off at phi = K.
struct ControlSchedule {
  double K = 1.0;
  double C = 1.0;
  double max_stochastic_duration = 0.0;  ///< > 0: after this long in one phase, K doubles

  void validate() const {
    if (!(C > 0.0)) throw ConfigError("control: C must be > 0");
    if (!(K > 0.0) || K < std::log(C)) throw ConfigError("control: need K > 0 and K >= log C");
    if (max_stochastic_duration < 0.0) throw ConfigError("control: max_stochastic_duration must be >= 0");
  }
};

inline double scale_value(double m, const ControlSchedule& s) {
  if (m < 0.0) throw DomainError("scale_value: m must be >= 0");
  return std::log(s.C + m * m);
}

inline double scale_inverse(double y, const ControlSchedule& s) {
  const double logC = std::log(s.C);
  if (y < logC) throw DomainError("scale_inverse: y must be >= log C");
  return std::sqrt(s.C * std::expm1(y - logC));
}

inline double level_hi(const ControlSchedule& s) { return scale_inverse(2.0 * s.K, s); }
inline double level_lo(const ControlSchedule& s) { return scale_inverse(s.K, s); }

/// Deterministic stepping while ||X||_F0 < L_hi; on crossing record tau_i and
/// integrate with noise until ||X||_F0 <= L_lo, record rho_i; repeat.
inline TrajectoryRecord control_run(const SpectralField& x0, const DriftOperator& drift, const NoiseSpec& noise,
                                    ControlSchedule sched, const StepperConfig& cfg, int cutoff,
                                    std::uint64_t seed = 0) {
  sched.validate();
  SpdeSystem sys{drift, noise, cutoff};
  PathRunner runner(x0, sys, cfg, seed, Regime::Deterministic);
  runner.set_levels(level_hi(sched), level_lo(sched), true);

  struct Phase {
    double t = 0.0, phi = 0.0, level = 0.0;
  };
  std::optional<Phase> open;
  std::vector<double> residuals;
  const double eps = cfg.epsilon;
  auto mart_level = [&](const PathRunner& r) {
    const auto& row = r.martingale();
    return row.M - 0.5 * eps * row.QV;
  };
  auto close_phase = [&](const PathRunner& r) {
    if (!open) return;
    const double dt = r.time() - open->t;
    const double lift = scale_value(r.norms().F0, sched) - open->phi - (mart_level(r) - open->level);
    residuals.push_back(dt > 0.0 ? lift / dt : 0.0);
    open.reset();
  };
  runner.on_event = [&](const ControlEvent& e, const PathRunner& r) {
    if (e.kind == EventKind::Tau)
      open = Phase{r.time(), scale_value(r.norms().F0, sched), mart_level(r)};
    else
      close_phase(r);
  };

  if (runner.norms().F0 >= runner.level_hi()) runner.force_event();
  double phase_clock = 0.0;
  while (runner.step_base()) {
    if (runner.regime() != Regime::Stochastic || sched.max_stochastic_duration <= 0.0) continue;
    const double since = runner.time() - std::max(phase_clock, open ? open->t : 0.0);
    if (since <= sched.max_stochastic_duration) continue;
    sched.K *= 2.0;
    runner.set_levels(level_hi(sched), level_lo(sched), true);
    runner.record().escalations.push_back({runner.time(), sched.K});
    runner.add_flag(kFlagEscalation);
    phase_clock = runner.time();
    if (runner.norms().F0 <= runner.level_lo()) runner.force_event(true);
  }
  if (runner.regime() == Regime::Stochastic) close_phase(runner);
  auto rec = runner.finish();
  rec.envelope_residuals = std::move(residuals);
  return rec;
}

struct ValidationReport {
  bool passed = true;
  std::vector<std::string> failures;
  std::optional<int> failing_index;
  std::optional<double> dwell_alpha;  ///< min_i (tau_i - rho_{i-1}) over deterministic intervals
  int deterministic_intervals = 0;

  void fail(int idx, std::string msg) {
    passed = false;
    if (!failing_index) failing_index = idx;
    failures.push_back("event " + std::to_string(idx) + ": " + std::move(msg));
  }
};

/// Alternation, ordering, level bands (tolerance = one-step overshoot) and
/// regime labels; reports the empirical dwell time alpha.
inline ValidationReport validate_schedule(const TrajectoryRecord& rec, const ControlSchedule& sched) {
  ValidationReport v;
  const auto& ev = rec.events;
  double prev_rho = 0.0, prev_t = 0.0;
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const auto& e = ev[i];
    const int idx = static_cast<int>(i);
    const EventKind want = i % 2 == 0 ? EventKind::Tau : EventKind::Rho;
    if (e.kind != want) v.fail(idx, std::string("expected ") + to_string(want));
    if (e.index != idx / 2) v.fail(idx, "index out of sequence");
    if (e.t < prev_t) v.fail(idx, "time decreases");
    prev_t = e.t;
    const double tol = e.step_change + 1e-9 * (1.0 + e.level);
    if (i == 0 && e.t == 0.0) {
      if (e.norm < e.level - tol) v.fail(idx, "initial tau below the high level");
    } else if (!e.escalated && std::abs(e.norm - e.level) > tol) {
      v.fail(idx, "norm outside the level band");
    }
    if (e.kind == EventKind::Tau) {
      if (e.t < prev_rho) v.fail(idx, "tau precedes previous rho");
      if (i > 0 || e.t > 0.0) {
        alpha = std::min(alpha, e.t - prev_rho);
        ++v.deterministic_intervals;
      }
    } else {
      prev_rho = e.t;
    }
  }
  const double hi0 = level_hi(sched), lo0 = level_lo(sched);
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const double floor = ev[i].kind == EventKind::Tau ? hi0 : lo0;
    if (ev[i].level < floor * (1.0 - 1e-12)) v.fail(static_cast<int>(i), "level below the schedule threshold");
  }
  if (v.deterministic_intervals > 0) {
    v.dwell_alpha = alpha;
    if (!(alpha > 0.0)) v.fail(-1, "dwell time alpha is not positive");
  }
  for (const auto& row : rec.rows) {
    std::size_t before = 0;
    while (before < ev.size() && ev[before].t <= row.t) ++before;
    const Regime want = before % 2 == 1 ? Regime::Stochastic : Regime::Deterministic;
    if (row.regime != want) {
      v.fail(-1, "row at t=" + detail::fmt17(row.t) + " carries the wrong regime label");
      break;
    }
  }
  return v;
}

}  // namespace stochtame
