#include "dslab/ode.hpp"

#include <algorithm>
#include <cmath>

#include "dslab/error.hpp"

namespace dslab::ode {

namespace {

// Dormand-Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

Result dopri5(const Rhs& f, double t0, const State& y0, double t1, const Options& opt, const StepHook& hook,
              const std::vector<double>& stops) {
  const size_t n = y0.size();
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  std::vector<double> pending;
  for (double s : stops)
    if ((s - t0) * dir > 0 && (t1 - s) * dir >= 0) pending.push_back(s);
  std::sort(pending.begin(), pending.end(), [dir](double a, double b) { return a * dir < b * dir; });
  pending.erase(std::unique(pending.begin(), pending.end()), pending.end());
  size_t next_stop = 0;

  Result res;
  res.t = t0;
  res.y = y0;
  State k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), ynew(n);
  f(res.t, res.y, k1);
  double h = std::min(std::abs(opt.h0), std::abs(t1 - t0));
  double err_prev = 1e-4;

  while ((t1 - res.t) * dir > 0) {
    if (res.steps + res.rejected > opt.max_steps) fail(ErrorCode::StepFailure, "dopri5: too many steps");
    h = std::min(h, opt.hmax);
    double target = next_stop < pending.size() ? pending[next_stop] : t1;
    bool clipped = false;
    double hstep = h;
    if (hstep >= std::abs(target - res.t)) {
      hstep = std::abs(target - res.t);
      clipped = true;
    }
    const double hs = hstep * dir;
    const double t = res.t;
    const State& y = res.y;
    for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * a21 * k1[i];
    f(t + c2 * hs, tmp, k2);
    for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    f(t + c3 * hs, tmp, k3);
    for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(t + c4 * hs, tmp, k4);
    for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(t + c5 * hs, tmp, k5);
    for (size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    f(t + hs, tmp, k6);
    for (size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    f(t + hs, ynew, k7);
    double err = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(e) / sc);
    }
    if (!std::isfinite(err)) err = 1e10;

    if (err <= 1.0) {
      res.t = clipped ? target : t + hs;
      res.y = ynew;
      res.steps++;
      if (clipped && next_stop < pending.size() && target == pending[next_stop]) next_stop++;
      bool stop = false;
      if (hook) stop = hook(res.t, res.y);
      f(res.t, res.y, k1);
      if (stop) {
        res.stopped = true;
        return res;
      }
      double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5) * std::pow(err_prev, 0.4 / 5);
      fac = std::clamp(fac, 0.2, 5.0);
      err_prev = std::max(err, 1e-4);
      h = clipped ? std::max(h, hstep * fac) : hstep * fac;
    } else {
      res.rejected++;
      double fac = std::max(0.2, 0.9 * std::pow(err, -0.2));
      h = hstep * fac;
      if (h < opt.hmin) fail(ErrorCode::StepFailure, "dopri5: step size underflow");
    }
  }
  return res;
}

}  // namespace dslab::ode
