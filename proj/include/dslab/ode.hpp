#pragma once

#include <functional>
#include <vector>

namespace dslab::ode {

using State = std::vector<double>;
using Rhs = std::function<void(double t, const State& y, State& dydt)>;

struct Options {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h0 = 1e-3;
  double hmin = 1e-14;
  double hmax = 1e300;
  long max_steps = 2000000;
};

// Called after every accepted step; may modify y (projection). Return true to stop.
using StepHook = std::function<bool(double t, State& y)>;

struct Result {
  double t = 0.0;
  State y;
  long steps = 0;
  long rejected = 0;
  bool stopped = false;  // true when a hook requested termination
};

// Dormand-Prince 5(4) with PI step control. Integrates from t0 towards t1 (either direction).
// Accepted steps are clipped so that every time in `stops` is hit exactly; the hook is
// called at each accepted step, including those stops.
Result dopri5(const Rhs& f, double t0, const State& y0, double t1, const Options& opt,
              const StepHook& hook = nullptr, const std::vector<double>& stops = {});

}  // namespace dslab::ode
