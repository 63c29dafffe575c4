#include "dslab/numerics.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace dslab {

namespace {

GaussRule compute_gauss(int m) {
  GaussRule r;
  r.x.resize(m);
  r.w.resize(m);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (m == 1) { p1 = x; p0 = 1.0; }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.x[i] = -x;
    r.x[m - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.w[i] = w;
    r.w[m - 1 - i] = w;
  }
  return r;
}

double adaptive_step(const std::function<double(double)>& f, double a, double b, double tol, int depth,
                     double whole) {
  double m = 0.5 * (a + b);
  const GaussRule& g = gauss_legendre(15);
  auto rule = [&](double lo, double hi) {
    double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo), s = 0.0;
    for (size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(c + h * g.x[i]);
    return s * h;
  };
  double left = rule(a, m), right = rule(m, b);
  if (std::abs(left + right - whole) < tol || depth <= 0) return left + right;
  return adaptive_step(f, a, m, 0.5 * tol, depth - 1, left) + adaptive_step(f, m, b, 0.5 * tol, depth - 1, right);
}

const double kLanczosG = 7.0;
const double kLanczos[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                            771.32342877765313,   -176.61502916214059,   12.507343278686905,
                            -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

}  // namespace

const GaussRule& gauss_legendre(int m) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  return cache.emplace(m, compute_gauss(m)).first->second;
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol, int max_depth) {
  const GaussRule& g = gauss_legendre(15);
  double c = 0.5 * (a + b), h = 0.5 * (b - a), s = 0.0;
  for (size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(c + h * g.x[i]);
  return adaptive_step(f, a, b, tol, max_depth, s * h);
}

cplx complex_lgamma(cplx z) {
  if (z.real() < 0.5) {
    // log Gamma(z) = log(pi / sin(pi z)) - log Gamma(1 - z)
    return std::log(kPi) - std::log(std::sin(kPi * z)) - complex_lgamma(1.0 - z);
  }
  z -= 1.0;
  cplx x = kLanczos[0];
  for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + double(i));
  cplx t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

cplx complex_gamma(cplx z) {
  if (z.real() < 0.5) {
    cplx s = std::sin(kPi * z);
    return kPi / (s * complex_gamma(1.0 - z));
  }
  z -= 1.0;
  cplx x = kLanczos[0];
  for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + double(i));
  cplx t = z + kLanczosG + 0.5;
  return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

cplx complex_rgamma(cplx z) {
  if (is_gamma_pole(z, 0.0)) return 0.0;
  if (z.real() < 0.5) {
    // 1/Gamma(z) = sin(pi z) Gamma(1 - z) / pi
    return std::sin(kPi * z) * complex_gamma(1.0 - z) / kPi;
  }
  return 1.0 / complex_gamma(z);
}

bool is_gamma_pole(cplx z, double tol) {
  if (std::abs(z.imag()) > tol) return false;
  if (z.real() > 0.5) return false;
  double r = std::round(z.real());
  return std::abs(z.real() - r) <= tol;
}

double smooth_step_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  double da = a / (t * t), db = -b / ((1.0 - t) * (1.0 - t));
  return (da * b - a * db) / ((a + b) * (a + b));
}

std::pair<cplx, double> extrapolate_to_zero(const std::vector<double>& x, const std::vector<cplx>& y) {
  size_t m = x.size();
  if (m == 0 || y.size() != m) throw std::invalid_argument("extrapolate_to_zero: size mismatch");
  std::vector<cplx> p(y);
  cplx prev = y[0];
  double err = 0.0;
  for (size_t k = 1; k < m; ++k) {
    for (size_t i = 0; i + k < m; ++i) {
      p[i] = (x[i + k] * p[i] - x[i] * p[i + 1]) / (x[i + k] - x[i]);
    }
    err = std::abs(p[0] - prev);
    prev = p[0];
  }
  return {p[0], err};
}

double fd_first(const std::function<double(double)>& f, double x, double h) {
  return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

double fd_second(const std::function<double(double)>& f, double x, double h) {
  return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) - f(x + 2 * h)) / (12 * h * h);
}

}  // namespace dslab
