#pragma once

#include <complex>
#include <functional>
#include <utility>
#include <vector>

namespace dslab {

using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

struct GaussRule {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
};

// Gauss-Legendre rule with m nodes (cached).
const GaussRule& gauss_legendre(int m);

// Integral of f over [a, b] by adaptive bisection with a 15/30-point pair.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                          int max_depth = 40);

// Complex Gamma and log-Gamma (Lanczos with reflection). rgamma is 1/Gamma, entire.
cplx complex_gamma(cplx z);
cplx complex_lgamma(cplx z);
cplx complex_rgamma(cplx z);

// True when z sits on a pole of Gamma within tol.
bool is_gamma_pole(cplx z, double tol = 1e-12);

// C-infinity step: 0 for t <= 0, 1 for t >= 1.
template <class S>
S smooth_step(const S& t) {
  using std::exp;
  if (t <= 0.0) return S(0.0);
  if (t >= 1.0) return S(1.0);
  S a = exp(-1.0 / t);
  S b = exp(-1.0 / (1.0 - t));
  return a / (a + b);
}
double smooth_step_derivative(double t);

// Neville extrapolation of samples (x_i, y_i) to x = 0. Returns value and error estimate.
std::pair<cplx, double> extrapolate_to_zero(const std::vector<double>& x, const std::vector<cplx>& y);

// Symmetric 5-point derivative stencils.
double fd_first(const std::function<double(double)>& f, double x, double h);
double fd_second(const std::function<double(double)>& f, double x, double h);

}  // namespace dslab
