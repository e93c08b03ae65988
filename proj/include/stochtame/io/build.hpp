#pragma once

#include <optional>
#include <vector>

#include "stochtame/experiments/audit.hpp"
#include "stochtame/experiments/ensemble.hpp"
#include "stochtame/integrators/path_runner.hpp"
#include "stochtame/io/config.hpp"
#include "stochtame/noise/martingale.hpp"

namespace stochtame {

inline DriftOperator make_drift(const RunConfig& c) {
  auto op = DriftOperator::make(c.model.kind, c.model.params);
  if (c.model.ladder) {
    const auto& e = *c.model.ladder;
    op.ladder = SpaceLadder::from_exponents(e[0], e[1], e[2], e[3]);
  }
  return op;
}

inline TorusGrid make_grid(const RunConfig& c) { return TorusGrid(c.model.grid_dim(), c.model.resolution); }

inline SpectralField make_initial(const RunConfig& c, const TorusGrid& g) {
  return c.initial.make(g, kind_components(c.model.kind));
}

inline StepperConfig make_stepper(const RunConfig& c) {
  StepperConfig s = c.stepper;
  s.save_stride = c.output.save_stride;
  if (c.control) s.scale_C = c.control->C;
  return s;
}

/// States along the deterministic orbit of the initial datum, evenly spaced
/// in accepted rows up to t_end or blow-up.
inline std::vector<SpectralField> orbit_probes(const RunConfig& c, int count) {
  if (count <= 0) return {};
  const auto g = make_grid(c);
  StepperConfig s = make_stepper(c);
  s.scheme = Scheme::RK4Deterministic;
  const auto base = static_cast<int>(std::llround(s.t_end / s.dt));
  s.snapshot_stride = std::max(1, base / count);
  auto r = integrate_path(make_initial(c, g), make_drift(c), std::nullopt, s, c.model.effective_cutoff());
  std::vector<SpectralField> out;
  for (auto& sn : r.snapshots) out.push_back(std::move(sn.field));
  return out;
}

struct NoiseChoice {
  NoiseSpec spec;
  std::optional<AuditResult> audit;
  std::optional<ThetaAdvice> advice;
};

/// Noise from the config; "advisor" entries are filled from an assumption
/// audit of the configured model.
inline NoiseChoice make_noise(const RunConfig& c) {
  NoiseChoice n;
  n.spec.theta = c.noise.theta;
  n.spec.alpha = c.noise.alpha;
  n.spec.case_label = c.taming_case();
  if (!c.noise.theta_advisor && !c.noise.alpha_advisor) return n;
  AuditOptions o;
  o.n_samples = c.audit.n_samples;
  o.amplitudes = c.audit.amplitudes;
  o.decay = c.audit.decay;
  o.seed = c.audit.seed;
  o.cutoff = c.model.effective_cutoff();
  o.probes = orbit_probes(c, c.audit.orbit_probes);
  n.audit = assumption_audit(make_drift(c), make_grid(c), o);
  n.advice = theta_advisor(n.spec.case_label, n.audit->constants, c.noise.advisor_epsilon, c.noise.advisor_margin);
  if (c.noise.theta_advisor) n.spec.theta = n.advice->theta;
  if (c.noise.alpha_advisor) n.spec.alpha = n.advice->alpha;
  return n;
}

/// The control section applies only when `controlled` is set.
inline EnsembleConfig make_ensemble(const RunConfig& c, const NoiseSpec& noise, std::uint64_t seed,
                                    bool controlled = false) {
  EnsembleConfig e;
  e.n_paths = c.ensemble.n_paths;
  e.base_seed = seed;
  e.d_list = c.ensemble.d_list;
  e.drift = make_drift(c);
  e.grid_dim = c.model.grid_dim();
  e.initial = c.initial;
  e.noise = noise;
  e.stepper = make_stepper(c);
  e.K_grid = c.ensemble.K_grid;
  e.K2_grid = c.ensemble.K2_grid;
  e.delta_grid = c.ensemble.delta_grid;
  e.aldous_level = c.ensemble.aldous_level;
  if (controlled) e.control = c.control;
  e.jobs = c.ensemble.jobs;
  return e;
}

}  // namespace stochtame
