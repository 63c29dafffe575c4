#pragma once

// Forward-mode automatic differentiation with a fixed number of seeds.
// Nesting Dual<Dual<double, N>, N> yields second derivatives.

#include <array>
#include <cmath>

namespace dslab {

template <class T, int N>
struct Dual {
  T v{};
  std::array<T, N> d{};

  Dual() = default;
  Dual(double x) : v(x) {}  // NOLINT(google-explicit-constructor)
  template <class U = T, class = std::enable_if_t<!std::is_same_v<U, double>>>
  Dual(const T& x) : v(x) {}  // NOLINT(google-explicit-constructor)

  static Dual variable(const T& x, int i) {
    Dual r(x);
    r.d[i] = T(1.0);
    return r;
  }

  Dual& operator+=(const Dual& o) { v += o.v; for (int i = 0; i < N; ++i) d[i] += o.d[i]; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; for (int i = 0; i < N; ++i) d[i] -= o.d[i]; return *this; }
  Dual& operator*=(const Dual& o) {
    for (int i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    T inv = T(1.0) / o.v;
    T q = v * inv;
    for (int i = 0; i < N; ++i) d[i] = (d[i] - q * o.d[i]) * inv;
    v = q;
    return *this;
  }
};

template <class T> struct is_dual : std::false_type {};
template <class T, int N> struct is_dual<Dual<T, N>> : std::true_type {};

template <class T, int N> Dual<T, N> operator+(Dual<T, N> a, const Dual<T, N>& b) { return a += b; }
template <class T, int N> Dual<T, N> operator-(Dual<T, N> a, const Dual<T, N>& b) { return a -= b; }
template <class T, int N> Dual<T, N> operator*(Dual<T, N> a, const Dual<T, N>& b) { return a *= b; }
template <class T, int N> Dual<T, N> operator/(Dual<T, N> a, const Dual<T, N>& b) { return a /= b; }

template <class T, int N> Dual<T, N> operator+(Dual<T, N> a, double b) { a.v += b; return a; }
template <class T, int N> Dual<T, N> operator+(double b, Dual<T, N> a) { a.v += b; return a; }
template <class T, int N> Dual<T, N> operator-(Dual<T, N> a, double b) { a.v -= b; return a; }
template <class T, int N> Dual<T, N> operator-(double b, const Dual<T, N>& a) {
  Dual<T, N> r;
  r.v = b - a.v;
  for (int i = 0; i < N; ++i) r.d[i] = -a.d[i];
  return r;
}
template <class T, int N> Dual<T, N> operator*(Dual<T, N> a, double b) {
  a.v *= b;
  for (int i = 0; i < N; ++i) a.d[i] *= b;
  return a;
}
template <class T, int N> Dual<T, N> operator*(double b, Dual<T, N> a) { return a * b; }
template <class T, int N> Dual<T, N> operator/(Dual<T, N> a, double b) { return a * (1.0 / b); }
template <class T, int N> Dual<T, N> operator/(double b, const Dual<T, N>& a) { return Dual<T, N>(b) / a; }
template <class T, int N> Dual<T, N> operator-(const Dual<T, N>& a) { return a * -1.0; }

template <class T, int N> bool operator<(const Dual<T, N>& a, double b) { return a.v < b; }
template <class T, int N> bool operator>(const Dual<T, N>& a, double b) { return a.v > b; }
template <class T, int N> bool operator<=(const Dual<T, N>& a, double b) { return a.v <= b; }
template <class T, int N> bool operator>=(const Dual<T, N>& a, double b) { return a.v >= b; }

inline double value_of(double x) { return x; }
template <class T, int N> double value_of(const Dual<T, N>& x) { return value_of(x.v); }

// Chain rule helper: f(a) with f(a.v) = fv and f'(a.v) = df.
template <class T, int N>
Dual<T, N> chain(const Dual<T, N>& a, const T& fv, const T& df) {
  Dual<T, N> r;
  r.v = fv;
  for (int i = 0; i < N; ++i) r.d[i] = df * a.d[i];
  return r;
}

using std::cos;
using std::cosh;
using std::exp;
using std::log;
using std::sin;
using std::sinh;
using std::sqrt;
using std::tanh;
using std::atan;
using std::abs;

template <class T, int N> Dual<T, N> exp(const Dual<T, N>& a) { T e = exp(a.v); return chain(a, e, e); }
template <class T, int N> Dual<T, N> log(const Dual<T, N>& a) { return chain(a, log(a.v), T(1.0) / a.v); }
template <class T, int N> Dual<T, N> sqrt(const Dual<T, N>& a) { T s = sqrt(a.v); return chain(a, s, T(0.5) / s); }
template <class T, int N> Dual<T, N> sin(const Dual<T, N>& a) { return chain(a, sin(a.v), cos(a.v)); }
template <class T, int N> Dual<T, N> cos(const Dual<T, N>& a) { return chain(a, cos(a.v), -sin(a.v)); }
template <class T, int N> Dual<T, N> sinh(const Dual<T, N>& a) { return chain(a, sinh(a.v), cosh(a.v)); }
template <class T, int N> Dual<T, N> cosh(const Dual<T, N>& a) { return chain(a, cosh(a.v), sinh(a.v)); }
template <class T, int N> Dual<T, N> tanh(const Dual<T, N>& a) {
  T t = tanh(a.v);
  return chain(a, t, T(1.0) - t * t);
}
template <class T, int N> Dual<T, N> atan(const Dual<T, N>& a) { return chain(a, atan(a.v), T(1.0) / (T(1.0) + a.v * a.v)); }
template <class T, int N> Dual<T, N> abs(const Dual<T, N>& a) { return value_of(a) < 0 ? -a : a; }

}  // namespace dslab
