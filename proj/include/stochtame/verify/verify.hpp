#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "stochtame/verify/acceptance.hpp"
#include "stochtame/verify/structural.hpp"

namespace stochtame {

/// Closed-form sanity checks that run in well under a second.
inline std::vector<CheckResult> trivial_suite() {
  std::vector<CheckResult> v;
  v.push_back(detail::timed("zero_norm", [] {
    SpectralField z(TorusGrid(2, 8), 2);
    return CheckResult{"", sobolev_norm(z, 3.0) == 0.0, "||0||_H3 = " + detail::fmt("%g", sobolev_norm(z, 3.0))};
  }));
  v.push_back(detail::timed("sine_H1", [] {
    const double n = sobolev_norm(sine_field(TorusGrid(1, 16)), 1.0);
    return CheckResult{"", std::abs(n - 1.0) <= 1e-15, "||sin x||_H1 = " + detail::fmt("%.17g", n)};
  }));
  v.push_back(detail::timed("heat_decay", [] {
    const auto c = parse_config(R"({"model": {"kind": "Linear", "resolution": 16, "params": {"nu": 1}},
      "stepper": {"scheme": "RK4Deterministic", "dt": 0.001, "t_end": 1.0}})");
    const auto r = integrate_path(make_initial(c, make_grid(c)), make_drift(c), std::nullopt, make_stepper(c),
                                  c.model.effective_cutoff());
    const double got = r.rows.back().norm_G, want = oracle::heat_decay(std::sqrt(0.5), 1.0);
    return CheckResult{"", std::abs(got - want) <= 1e-6, "||X_1||_L2 " + detail::fmt("%.10f", got) + " vs " +
                                                               detail::fmt("%.10f", want)};
  }));
  v.push_back(detail::timed("zero_horizon", [] {
    const auto c = parse_config(R"({"stepper": {"t_end": 0}})");
    const auto r = integrate_path(make_initial(c, make_grid(c)), make_drift(c), std::nullopt, make_stepper(c),
                                  c.model.effective_cutoff());
    return CheckResult{"", r.rows.size() == 1 && r.survived(), std::to_string(r.rows.size()) + " rows"};
  }));
  v.push_back(detail::timed("gbm_criterion", [] {
    const bool ok = gbm_decay_criterion({1.0, 2.0, 1.0}) && !gbm_decay_criterion({1.0, 1.0, 1.0});
    return CheckResult{"", ok, "b^2 > 2a decides decay"};
  }));
  v.push_back(detail::timed("scale_offset", [] {
    const ControlSchedule s{1.0, 1.0};
    const double y = scale_value(std::sqrt(std::exp(1.0) - 1.0), s);
    return CheckResult{"", std::abs(y - 1.0) <= 1e-15, "log(1 + (e - 1)) = " + detail::fmt("%.17g", y)};
  }));
  v.push_back(detail::timed("default_config", [] {
    const auto c = parse_config("{}");
    return CheckResult{"", serialize_config(c) == serialize_config(RunConfig{}), "empty document gives defaults"};
  }));
  return v;
}

}  // namespace stochtame
