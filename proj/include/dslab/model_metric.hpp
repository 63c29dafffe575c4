#pragma once

// Scalar-generic metric formulas shared by the curvature oracle, geodesic shooting and the flow.

#include <cmath>
#include <type_traits>
#include <utility>

#include "dslab/dual.hpp"
#include "dslab/error.hpp"
#include "dslab/geometry.hpp"
#include "dslab/numerics.hpp"

namespace dslab {

template <class T>
T bump_t(const T& r) {
  if (r <= -1.0 || r >= 1.0) return T(0.0);
  return exp(1.0 - 1.0 / (1.0 - r * r));
}

// delta * bump at collar value x0 (zero on the past end).
template <class T>
T perturbation_profile(const SpacetimeModel& m, const T& x0, End end) {
  if (m.kind != ModelKind::PerturbedDS || end != End::Future || m.pert.amplitude == 0.0) return T(0.0);
  return m.pert.amplitude * bump_t((x0 - m.pert.center) / m.pert.width);
}

// Interior-chart metric, row-major n x n.
template <class T>
void interior_metric(const SpacetimeModel& m, const T* x, T* g) {
  const int n = m.n;
  for (int i = 0; i < n * n; ++i) g[i] = T(0.0);
  if (m.kind == ModelKind::Flat) {
    g[0] = T(1.0);
    for (int i = 1; i < n; ++i) g[i * n + i] = T(-1.0);
    return;
  }
  const T& h = x[0];
  T s(0.0);
  for (int i = 1; i < n; ++i) s += x[i] * x[i];
  T ch = cosh(h);
  T q = 1.0 + s;
  T conf = 4.0 * ch * ch / (q * q);
  g[0] = T(1.0);
  for (int i = 1; i < n; ++i) g[i * n + i] = -conf;
  if (m.kind == ModelKind::PerturbedDS && h > 0.0) {
    T c = exp(-2.0 * h);
    T b = perturbation_profile(m, c, End::Future);
    if (value_of(b) != 0.0) {
      T coef = b / c;
      // gradient of X1 = 2 u_1 / (1 + s)
      for (int i = 1; i < n; ++i) {
        T di = (i == 1 ? 2.0 / q : T(0.0)) - 4.0 * x[1] * x[i] / (q * q);
        for (int j = 1; j < n; ++j) {
          T dj = (j == 1 ? 2.0 / q : T(0.0)) - 4.0 * x[1] * x[j] / (q * q);
          g[i * n + j] -= coef * di * dj;
        }
      }
    }
  }
}

// Smooth boundary defining function in the interior: constant for |h| <= 0.1, e^{-2|h|} for |h| >= 0.5.
template <class T>
T smooth_bdf(const T& h) {
  T a = h < 0.0 ? -h : h;
  T H = a;
  if (a < 0.5) {
    T w = a - 0.1;
    H = 0.1 + smooth_step(w / 0.4) * w;
    if (a <= 0.1) H = T(0.1);
  }
  return exp(-2.0 * H);
}

// Solve A y = b in place by Gaussian elimination with partial pivoting on values.
template <class T>
void solve_small(int n, T* A, T* b) {
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(value_of(A[i * n + k])) > std::abs(value_of(A[p * n + k]))) p = i;
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(A[k * n + j], A[p * n + j]);
      std::swap(b[k], b[p]);
    }
    for (int i = k + 1; i < n; ++i) {
      T f = A[i * n + k] / A[k * n + k];
      for (int j = k; j < n; ++j) A[i * n + j] -= f * A[k * n + j];
      b[i] -= f * b[k];
    }
  }
  for (int k = n - 1; k >= 0; --k) {
    T s = b[k];
    for (int j = k + 1; j < n; ++j) s -= A[k * n + j] * b[j];
    b[k] = s / A[k * n + k];
  }
}

// Geodesic acceleration a^k = -Gamma^k_ij v^i v^j of the interior metric.
template <class S, int N>
void geodesic_accel(const SpacetimeModel& m, const S* x, const S* v, S* a) {
  using D = Dual<S, N>;
  const int n = m.n;
  D xd[N];
  for (int i = 0; i < n; ++i) {
    xd[i] = D(x[i]);
    xd[i].d[i] = S(1.0);
  }
  D gd[N * N];
  interior_metric(m, xd, gd);
  S g[N * N];
  S w[N];
  for (int i = 0; i < n * n; ++i) g[i] = gd[i].v;
  for (int l = 0; l < n; ++l) {
    S acc(0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        // d_i g_lj v^i v^j - 1/2 d_l g_ij v^i v^j
        acc += (gd[l * n + j].d[i] - 0.5 * gd[i * n + j].d[l]) * v[i] * v[j];
      }
    }
    w[l] = -acc;
  }
  solve_small(n, g, w);
  for (int k = 0; k < n; ++k) a[k] = w[k];
}

template <class F>
decltype(auto) dispatch_dim(int n, F&& f) {
  switch (n) {
    case 2: return f(std::integral_constant<int, 2>{});
    case 4: return f(std::integral_constant<int, 4>{});
    case 6: return f(std::integral_constant<int, 6>{});
    case 8: return f(std::integral_constant<int, 8>{});
    default: fail(ErrorCode::BadParams, "dimension must be one of 2, 4, 6, 8");
  }
}

}  // namespace dslab
