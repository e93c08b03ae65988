#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stochtame/experiments/ensemble.hpp"
#include "stochtame/io/config.hpp"
#include "stochtame/models/drift_operator.hpp"
#include "stochtame/models/kernels.hpp"
#include "stochtame/noise/sde_lab.hpp"
#include "stochtame/spectral/projection.hpp"
#include "stochtame/spectral/random_field.hpp"
#include "stochtame/spectral/snapshot.hpp"
#include "stochtame/verify/oracles.hpp"
#include "stochtame/verify/result.hpp"

namespace stochtame {

namespace detail {

inline double max_abs(const SpectralField& f) {
  double m = 0.0;
  for (auto z : f.coeffs()) m = std::max(m, std::abs(z));
  return m;
}

inline SpectralField zero_mean(SpectralField f) {
  for (int c = 0; c < f.components(); ++c) f.at(c, 0) = Complex{};
  return f;
}

}  // namespace detail

inline CheckResult check_interpolation(int n_fields = 10000) {
  const std::vector<SpaceLadder> ladders{SpaceLadder::from_exponents(0, 1, 3, 4), SpaceLadder::from_exponents(0, 2, 3, 4),
                                         SpaceLadder::from_exponents(0, 1, 2, 3)};
  const std::vector<TorusGrid> grids{TorusGrid(1, 32), TorusGrid(2, 16)};
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> dec(1.0, 5.0), amp(1e-3, 1e3);
  int violations = 0;
  for (int i = 0; i < n_fields; ++i) {
    const auto& g = grids[static_cast<std::size_t>(i) % grids.size()];
    const auto& l = ladders[static_cast<std::size_t>(i / 2) % ladders.size()];
    auto f = random_field(g, 1 + i % 2, dec(rng), amp(rng), 1000 + static_cast<std::uint64_t>(i));
    auto s = interpolation_check(f, l);
    if (!(s.lhs <= s.rhs)) ++violations;
  }
  return {"interpolation", violations == 0, std::to_string(violations) + " violations / " + std::to_string(n_fields)};
}

inline CheckResult check_projection() {
  int bad = 0, total = 0;
  for (int dim : {1, 2, 3}) {
    TorusGrid g(dim, dim == 3 ? 8 : 32);
    for (int s = 0; s < 20; ++s) {
      auto f = random_field(g, dim, 2.5, 1.0, 40 + static_cast<std::uint64_t>(s));
      GalerkinProjector p{1 + s % (g.n() / 2)};
      auto pf = galerkin_project(f, p);
      ++total;
      bool ok = galerkin_project(pf, p) == pf && is_band_limited(pf, p.cutoff);
      for (double e : {0.0, 1.0, 2.0, 3.0}) ok = ok && sobolev_norm(pf, e) <= sobolev_norm(f, e);
      bad += ok ? 0 : 1;
    }
  }
  return {"projection", bad == 0, std::to_string(bad) + " of " + std::to_string(total) + " fields not idempotent/contractive"};
}

inline CheckResult check_biot_savart() {
  double worst = 0.0;
  TorusGrid g2(2, 32);
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto w = detail::zero_mean(random_field(g2, 1, 2.0, 1.0, 70 + s));
    auto u = biot_savart(w);
    worst = std::max({worst, detail::max_abs(divergence(u)), detail::max_abs(curl(u) - w)});
  }
  TorusGrid g3(3, 8);
  for (std::uint64_t s = 0; s < 5; ++s) {
    auto w = curl(random_field(g3, 3, 2.0, 1.0, 90 + s));
    auto u = biot_savart(w);
    worst = std::max({worst, detail::max_abs(divergence(u)), detail::max_abs(curl(u) - w)});
  }
  return {"biot_savart", worst <= 1e-12, "max identity residual " + detail::fmt("%.2e", worst)};
}

inline CheckResult check_enstrophy() {
  TorusGrid g(2, 32);
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto w = detail::zero_mean(dealias(random_field(g, 1, 2.0, 1.0, 900 + s)));
    const double p = inner_product(w, vorticity_drift(w, 0.0), 0.0);
    worst = std::max(worst, std::abs(p) / sobolev_norm_sq(w, 0.0));
  }
  return {"enstrophy", worst <= 1e-10, "max relative pairing " + detail::fmt("%.2e", worst)};
}

inline CheckResult check_rsw_mass() {
  TorusGrid g(2, 32);
  RswParams p{1.3, 0.5, 2.0, 0.01, 0.02, nullptr};
  double worst = 0.0;
  for (int s = 0; s < 20; ++s) {
    auto x = dealias(random_field(g, 3, 3.0, 1.0, 60 + static_cast<std::uint64_t>(s)));
    x.at(2, 0) += 5.0;
    worst = std::max(worst, std::abs(rsw_drift(x, p, s % 2 == 0).at(2, 0)));
  }
  return {"rsw_mass", worst <= 1e-12, "max mean-height tendency " + detail::fmt("%.2e", worst)};
}

inline CheckResult check_scale_function() {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> ua(-1.0, 2.0), ub(0.5, 3.0), ux(0.2, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double a = ua(rng), b = ub(rng), x = ux(rng), c = 1.0;
    ScaleFunctionSpec s{[a](double y) { return a * y; }, [b](double y) { return b * y; }, c};
    const double ref = oracle::gbm_scale(a, b, c, x);
    worst = std::max(worst, std::abs(scale_function(s, x) - ref) / std::abs(ref));
  }
  return {"scale_function", worst <= 1e-6, "max relative error " + detail::fmt("%.2e", worst)};
}

/// parse(serialize(c)) for every config in `config_dir`, plus a bit-exact
/// snapshot round trip.
inline CheckResult check_round_trips(const std::string& config_dir) {
  int n = 0;
  std::vector<std::string> bad;
  std::vector<RunConfig> configs{RunConfig{}};
  if (!config_dir.empty() && std::filesystem::is_directory(config_dir))
    for (const auto& e : std::filesystem::directory_iterator(config_dir))
      if (e.path().extension() == ".json") configs.push_back(load_config(e.path().string()));
  for (const auto& c : configs) {
    ++n;
    const auto s = serialize_config(c);
    if (serialize_config(parse_config(s)) != s || config_hash(parse_config(s)) != config_hash(c))
      bad.push_back(std::to_string(n));
  }
  auto f = random_field(TorusGrid(3, 8), 3, 2.0, 1.3, 77);
  std::stringstream ss;
  write_snapshot(ss, f);
  const bool snap = read_snapshot(ss) == f;
  return {"round_trips", bad.empty() && snap,
          std::to_string(n) + " configs, " + std::to_string(bad.size()) + " mismatched; snapshot " + (snap ? "exact" : "differs")};
}

inline CheckResult check_seed_reproducibility() {
  EnsembleConfig c;
  ModelParams p;
  p.nu = 0.05;
  c.drift = DriftOperator::make(DriftKind::Burgers1D, p);
  c.n_paths = 4;
  c.d_list = {8, 16};
  c.noise = NoiseSpec{1.0, 0.5};
  c.stepper.scheme = Scheme::TamedRK4EM;
  c.stepper.dt = 2e-3;
  c.stepper.t_end = 0.5;
  c.K_grid = {1.0, 2.0};
  c.delta_grid = {0.01, 0.1};
  const auto a = run_ensemble(c);
  const auto b = run_ensemble(c);
  c.jobs = 2;
  const auto par = run_ensemble(c);
  c.jobs = 1;
  c.base_seed = 1;
  const auto other = run_ensemble(c);
  const bool ok = a == b && a == par && !(other == a);
  return {"seed_reproducibility", ok, ok ? "repeat and 2-thread runs identical" : "ensemble results differ between identical runs"};
}

inline std::vector<CheckResult> structural_suite(const std::string& config_dir) {
  return {detail::timed("interpolation", [] { return check_interpolation(); }),
          detail::timed("projection", check_projection),
          detail::timed("biot_savart", check_biot_savart),
          detail::timed("enstrophy", check_enstrophy),
          detail::timed("rsw_mass", check_rsw_mass),
          detail::timed("scale_function", check_scale_function),
          detail::timed("round_trips", [&] { return check_round_trips(config_dir); }),
          detail::timed("seed_reproducibility", check_seed_reproducibility)};
}

}  // namespace stochtame
