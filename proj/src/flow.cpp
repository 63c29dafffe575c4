#include "dslab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dslab/dual.hpp"
#include "dslab/error.hpp"
#include "dslab/model_metric.hpp"
#include "dslab/ode.hpp"
#include "dslab/operator.hpp"

namespace dslab {

std::string variant_name(SymbolVariant v) { return v == SymbolVariant::Microlocal ? "microlocal" : "semiclassical"; }

SymbolVariant parse_variant(const std::string& s) {
  if (s == "microlocal" || s == "microlocal_p") return SymbolVariant::Microlocal;
  if (s == "semiclassical" || s == "semiclassical_p_omega") return SymbolVariant::Semiclassical;
  fail(ErrorCode::ConfigError, "unknown flow variant '" + s + "'");
}

std::string TerminalLabel::set_name() const {
  if (kind != FlowTerminal::RadialSet) return "";
  return set_sign > 0 ? "L+" : "L-";
}

std::string TerminalLabel::name() const {
  switch (kind) {
    case FlowTerminal::MaxTime: return "MaxTime";
    case FlowTerminal::Escaped: return "Escaped";
    case FlowTerminal::RadialSet: break;
  }
  return std::string("Lambda^") + (eps1 > 0 ? "+" : "-") + "_" + (eps2 > 0 ? "+" : "-");
}

namespace {

template <class T>
T dual_norm_t(const SpacetimeModel& m, const T& c, const T* x, const T* xi, End end, int n) {
  T a = 0.25 * (1.0 + c) * (1.0 + c);
  T k = perturbation_profile(m, c, end) / a;
  T xx(0.0), ee(0.0), xe(0.0), te(0.0), tt(0.0);
  for (int i = 0; i < n; ++i) {
    xx += x[i] * x[i];
    ee += xi[i] * xi[i];
    xe += x[i] * xi[i];
  }
  for (int i = 0; i < n; ++i) {
    T ti = (i == 0 ? xx : T(0.0)) - x[0] * x[i];
    te += ti * xi[i];
    tt += ti * ti;
  }
  return (xx * ee - xe * xe - k * te * te / (1.0 + k * tt)) / a;
}

template <class T>
T symbol_t(const SpacetimeModel& m, SymbolVariant v, const T& c, const T* x, double rho, const T& xh0, const T* xh,
           End end, double omega, int n) {
  T al, be, ga;
  symbol_profile(c, al, be, ga);
  T p = al * (-4.0 * c * xh0 * xh0 + dual_norm_t(m, c, x, xh, end, n));
  if (v == SymbolVariant::Semiclassical) p += omega * rho * be * xh0 + omega * omega * rho * rho * ga;
  return p;
}

// Values and first derivatives of rho^2 p and of the fiber norm.
struct Jet {
  double p = 0.0, pc = 0.0, p0 = 0.0;
  std::vector<double> px, pxi;
  double nn = 0.0, nc = 0.0, n0 = 0.0;
  std::vector<double> nx, nxi;
};

Jet jet(const SpacetimeModel& m, SymbolVariant v, const PhaseState& s, double omega) {
  const int n = m.n;
  Jet J;
  dispatch_dim(n, [&](auto NC) {
    constexpr int N = decltype(NC)::value;
    constexpr int M = 2 * N + 2;
    using D = Dual<double, M>;
    D c = D::variable(s.x0, 0);
    D x[N], xh[N];
    for (int i = 0; i < N; ++i) {
      x[i] = D::variable(s.x_prime[i], 1 + i);
      xh[i] = D::variable(s.xi_hat_prime[i], N + 2 + i);
    }
    D xh0 = D::variable(s.xi_hat0, N + 1);
    D p = symbol_t(m, v, c, x, s.rho, xh0, xh, s.end, omega, N);
    D nn = xh0 * xh0 + dual_norm_t(m, c, x, xh, s.end, N);
    J.p = p.v;
    J.pc = p.d[0];
    J.p0 = p.d[N + 1];
    J.nn = nn.v;
    J.nc = nn.d[0];
    J.n0 = nn.d[N + 1];
    J.px.resize(N);
    J.pxi.resize(N);
    J.nx.resize(N);
    J.nxi.resize(N);
    for (int i = 0; i < N; ++i) {
      J.px[i] = p.d[1 + i];
      J.pxi[i] = p.d[N + 2 + i];
      J.nx[i] = nn.d[1 + i];
      J.nxi[i] = nn.d[N + 2 + i];
    }
    return 0;
  });
  return J;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double omega_of(SymbolVariant v, const FlowParams& prm) { return v == SymbolVariant::Semiclassical ? prm.omega_R : 0.0; }

struct FieldValue {
  PhaseState d;
  double K = 0.0;  // -2 H_p rho
};

FieldValue field(const SpacetimeModel& m, SymbolVariant v, const PhaseState& s, const FlowParams& prm) {
  const int n = m.n;
  Jet J = jet(m, v, s, omega_of(v, prm));
  FieldValue f;
  PhaseState& d = f.d;
  d.end = s.end;
  d.x0 = J.p0;
  d.x_prime = J.pxi;
  const double F0 = -J.pc;
  const double mu = dot(s.x_prime, J.px) - dot(d.x_prime, s.xi_hat_prime);
  std::vector<double> F(n);
  for (int i = 0; i < n; ++i) F[i] = -J.px[i] + mu * s.x_prime[i];
  f.K = J.nc * d.x0 + dot(J.nx, d.x_prime) + J.n0 * F0 + dot(J.nxi, F);
  d.rho = -0.5 * s.rho * f.K;
  d.xi_hat0 = F0 - 0.5 * f.K * s.xi_hat0;
  d.xi_hat_prime.resize(n);
  for (int i = 0; i < n; ++i) d.xi_hat_prime[i] = F[i] - 0.5 * f.K * s.xi_hat_prime[i];
  return f;
}

std::vector<double> pack(const PhaseState& s) {
  std::vector<double> y{s.x0};
  y.insert(y.end(), s.x_prime.begin(), s.x_prime.end());
  y.push_back(s.rho);
  y.push_back(s.xi_hat0);
  y.insert(y.end(), s.xi_hat_prime.begin(), s.xi_hat_prime.end());
  return y;
}

PhaseState unpack(const std::vector<double>& y, int n, End end) {
  PhaseState s;
  s.end = end;
  s.x0 = y[0];
  s.x_prime.assign(y.begin() + 1, y.begin() + 1 + n);
  s.rho = y[1 + n];
  s.xi_hat0 = y[2 + n];
  s.xi_hat_prime.assign(y.begin() + 3 + n, y.begin() + 3 + 2 * n);
  return s;
}

// Moves from the future collar past x0 = 1 to the past collar (x0 -> 1/x0) and back.
void switch_end(const SpacetimeModel& m, PhaseState& s) {
  const double c = s.x0;
  s.x0 = 1.0 / c;
  s.xi_hat0 = -c * c * s.xi_hat0;
  s.end = s.end == End::Future ? End::Past : End::Future;
  normalize_state(m, s);
}

double radial_distance2(const SpacetimeModel& m, const PhaseState& s) {
  return s.rho * s.rho + s.x0 * s.x0 + boundary_dual_norm(m, s.x0, s.x_prime, s.xi_hat_prime, s.end);
}

// Time derivative of the squared distance to the radial sets along the rescaled field.
double radial_distance2_rate(const SpacetimeModel& m, SymbolVariant v, const PhaseState& s, const FlowParams& prm) {
  FieldValue f = field(m, v, s, prm);
  Jet J = jet(m, v, s, omega_of(v, prm));
  return 2.0 * s.rho * f.d.rho + 2.0 * s.x0 * f.d.x0 + J.nc * f.d.x0 + dot(J.nx, f.d.x_prime) +
         dot(J.nxi, f.d.xi_hat_prime);
}

// Newton steps on rho^2 p along its gradient in (x0, xi_hat).
void project_characteristic(const SpacetimeModel& m, SymbolVariant v, PhaseState& s, const FlowParams& prm) {
  for (int it = 0; it < 3; ++it) {
    Jet J = jet(m, v, s, omega_of(v, prm));
    if (std::abs(J.p) < 1e-15) break;
    // tangential part of the xi_hat' gradient
    std::vector<double> gxi = J.pxi;
    double a = dot(gxi, s.x_prime);
    for (size_t i = 0; i < gxi.size(); ++i) gxi[i] -= a * s.x_prime[i];
    double g2 = J.pc * J.pc + J.p0 * J.p0 + dot(gxi, gxi);
    if (!(g2 > 0.0)) break;
    double lam = J.p / g2;
    s.x0 -= lam * J.pc;
    s.xi_hat0 -= lam * J.p0;
    for (size_t i = 0; i < gxi.size(); ++i) s.xi_hat_prime[i] -= lam * gxi[i];
    normalize_state(m, s);
  }
}

}  // namespace

double rescaled_symbol(const SpacetimeModel& m, SymbolVariant v, const PhaseState& s, const FlowParams& prm) {
  return symbol_t<double>(m, v, s.x0, s.x_prime.data(), s.rho, s.xi_hat0, s.xi_hat_prime.data(), s.end,
                          omega_of(v, prm), m.n);
}

double fiber_norm(const SpacetimeModel& m, const PhaseState& s) {
  return s.xi_hat0 * s.xi_hat0 + dual_norm_t<double>(m, s.x0, s.x_prime.data(), s.xi_hat_prime.data(), s.end, m.n);
}

PhaseState rescaled_hamiltonian_field(const SpacetimeModel& m, SymbolVariant v, const PhaseState& s,
                                      const FlowParams& prm) {
  return field(m, v, s, prm).d;
}

void normalize_state(const SpacetimeModel& m, PhaseState& s) {
  const int n = m.n;
  double r = std::sqrt(dot(s.x_prime, s.x_prime));
  for (double& v : s.x_prime) v /= r;
  double a = dot(s.xi_hat_prime, s.x_prime);
  for (int i = 0; i < n; ++i) s.xi_hat_prime[i] -= a * s.x_prime[i];
  double N = fiber_norm(m, s);
  if (!(N > 0.0)) fail(ErrorCode::ConstraintDrift, "fiber norm vanished");
  double q = 1.0 / std::sqrt(N);
  s.rho *= q;
  s.xi_hat0 *= q;
  for (double& v : s.xi_hat_prime) v *= q;
}

int characteristic_component(const SpacetimeModel& m, SymbolVariant v, const PhaseState& s, const FlowParams& prm) {
  (void)m;
  const int e1 = s.end == End::Future ? 1 : -1;
  double zeta = s.xi_hat0;
  if (v == SymbolVariant::Semiclassical && s.x0 > 0.0) {
    double al, be, ga;
    symbol_profile(s.x0, al, be, ga);
    zeta -= prm.omega_R * s.rho * be / (8.0 * s.x0 * al);
  }
  if (zeta == 0.0) return 0;
  return zeta > 0.0 ? -e1 : e1;
}

Trajectory integrate_bicharacteristic(const SpacetimeModel& m, const PhaseState& s0, SymbolVariant v,
                                      const FlowParams& prm, double t_max, double tol) {
  m.validate();
  if (m.kind == ModelKind::Flat) fail(ErrorCode::OutOfChart, "flat model has no collar");
  const int n = m.n;
  const double dir = t_max >= 0.0 ? 1.0 : -1.0;
  Trajectory tr;
  PhaseState st = s0;
  normalize_state(m, st);
  tr.component = characteristic_component(m, v, st, prm);
  tr.min_x0 = st.x0;
  {
    double p = std::abs(rescaled_symbol(m, v, st, prm));
    if (p > 1e-8) fail(ErrorCode::ConstraintDrift, "start is not on the characteristic set");
  }
  End end = st.end;
  tr.samples.push_back({0.0, st});

  auto rhs = [&](double, const ode::State& y, ode::State& dy) {
    PhaseState s = unpack(y, n, end);
    dy = pack(field(m, v, s, prm).d);
  };
  bool done = false;
  auto hook = [&](double t, ode::State& y) {
    PhaseState s = unpack(y, n, end);
    normalize_state(m, s);
    tr.max_constraint = std::max(tr.max_constraint, std::abs(rescaled_symbol(m, v, s, prm)));
    project_characteristic(m, v, s, prm);
    if (std::abs(rescaled_symbol(m, v, s, prm)) > prm.constraint_tol)
      fail(ErrorCode::ConstraintDrift, "characteristic constraint could not be restored");
    if (s.x0 > 1.0) {
      switch_end(m, s);
      end = s.end;
    }
    tr.min_x0 = std::min(tr.min_x0, s.x0);
    tr.time = t;
    if (int(tr.samples.size()) < prm.max_samples) tr.samples.push_back({t, s});
    else tr.samples.back() = {t, s};
    y = pack(s);
    if (s.x0 < -m.ext_margin) {
      tr.terminal.kind = FlowTerminal::Escaped;
      return done = true;
    }
    if (std::sqrt(radial_distance2(m, s)) < prm.capture_radius && dir * radial_distance2_rate(m, v, s, prm) < 0.0) {
      tr.terminal.kind = FlowTerminal::RadialSet;
      tr.terminal.set_sign = s.xi_hat0 > 0.0 ? 1 : -1;
      tr.terminal.eps1 = s.end == End::Future ? 1 : -1;
      tr.terminal.eps2 = -tr.terminal.eps1 * tr.terminal.set_sign;
      return done = true;
    }
    return false;
  };
  ode::Options o;
  o.rtol = tol;
  o.atol = tol;
  o.h0 = 1e-3;
  o.hmax = 0.05;
  ode::dopri5(rhs, 0.0, pack(st), t_max, o, hook);
  if (!done) tr.terminal.kind = FlowTerminal::MaxTime;
  return tr;
}

std::vector<PhaseState> random_characteristic_states(const SpacetimeModel& m, SymbolVariant v,
                                                     const FlowParams& prm, int count, std::uint64_t seed,
                                                     int component) {
  const int n = m.n;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::normal_distribution<double> G;
  std::vector<PhaseState> out;
  int attempts = 0;
  while (int(out.size()) < count) {
    if (++attempts > 1000 * (count + 1)) fail(ErrorCode::BadParams, "could not sample characteristic states");
    PhaseState s;
    s.end = U(rng) < 0.5 ? End::Future : End::Past;
    s.x0 = 0.05 + 0.85 * U(rng);
    s.x_prime.resize(n);
    for (double& x : s.x_prime) x = G(rng);
    std::vector<double> dir(n);
    for (double& x : dir) x = G(rng);
    double r = std::sqrt(dot(s.x_prime, s.x_prime));
    for (double& x : s.x_prime) x /= r;
    double a = dot(dir, s.x_prime);
    for (int i = 0; i < n; ++i) dir[i] -= a * s.x_prime[i];
    double qd = boundary_dual_norm(m, s.x0, s.x_prime, dir, s.end);
    for (double& x : dir) x /= std::sqrt(qd);
    const int e1 = s.end == End::Future ? 1 : -1;
    const int want = component != 0 ? component : (U(rng) < 0.5 ? 1 : -1);
    const double sign0 = -e1 * want;
    if (v == SymbolVariant::Microlocal || prm.omega_R == 0.0) {
      double x0h = 1.0 / std::sqrt(1.0 + 4.0 * s.x0);
      double q = 4.0 * s.x0 / (1.0 + 4.0 * s.x0);
      s.rho = 0.0;
      s.xi_hat0 = sign0 * x0h;
      s.xi_hat_prime = dir;
      for (double& x : s.xi_hat_prime) x *= std::sqrt(q);
    } else {
      double q = 0.05 + 0.9 * U(rng);
      double x0h = (U(rng) < 0.5 ? 1.0 : -1.0) * std::sqrt(1.0 - q);
      double al, be, ga;
      symbol_profile(s.x0, al, be, ga);
      const double w = prm.omega_R;
      double A = w * w * ga, B = w * be * x0h, C = al * (q - 4.0 * s.x0 * x0h * x0h);
      double rho = -1.0;
      if (std::abs(A) < 1e-14) {
        if (B != 0.0) rho = -C / B;
      } else {
        double disc = B * B - 4 * A * C;
        if (disc >= 0.0) {
          double qq = -0.5 * (B + std::copysign(std::sqrt(disc), B));
          double r1 = qq / A, r2 = C / qq;
          rho = std::min(r1, r2) > 0.0 ? std::min(r1, r2) : std::max(r1, r2);
        }
      }
      if (!(rho > 0.0) || rho > 1.0) continue;
      s.rho = rho;
      s.xi_hat0 = x0h;
      s.xi_hat_prime = dir;
      for (double& x : s.xi_hat_prime) x *= std::sqrt(q);
      if (characteristic_component(m, v, s, prm) != want) continue;
    }
    normalize_state(m, s);
    out.push_back(s);
  }
  return out;
}

RadialSetReport radial_quantities(const SpacetimeModel& m, int set_sign, int n_samples, const FlowParams& prm,
                                  std::uint64_t seed) {
  const int n = m.n;
  if (set_sign != 1 && set_sign != -1) fail(ErrorCode::BadParams, "radial set label must be L+ or L-");
  RadialSetReport rep;
  rep.set_sign = set_sign;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> G;
  const cplx I(0.0, 1.0);
  rep.beta1_lower = 1e300;
  for (int k = 0; k < n_samples; ++k) {
    PhaseState s;
    s.end = k % 2 == 0 ? End::Future : End::Past;
    s.x0 = 0.0;
    s.rho = 0.0;
    s.xi_hat0 = set_sign;
    s.x_prime.resize(n);
    for (double& x : s.x_prime) x = G(rng);
    s.xi_hat_prime.assign(n, 0.0);
    normalize_state(m, s);
    FieldValue f = field(m, SymbolVariant::Microlocal, s, prm);
    const double hp_rho = -0.5 * f.K;
    const double b0 = -set_sign * hp_rho;
    rep.beta0.push_back(b0);
    CollarOperatorCoeffs P = collar_coeffs(m, 0.0, s.x_prime, s.end, prm.lambda);
    CollarOperatorCoeffs Pb = collar_coeffs(m, 0.0, s.x_prime, s.end, std::conj(prm.lambda));
    // rho * principal symbol of (P - P^*)/(2i) at L; P(lambda)^* = P(conj lambda)
    const double p1_rho = (((P.a1 - Pb.a1) / (2.0 * I)) * I).real() * s.xi_hat0;
    rep.beta_tilde.push_back(-set_sign * p1_rho / b0);
    rep.samples.push_back(s);
    TerminalLabel lab;
    lab.kind = FlowTerminal::RadialSet;
    lab.set_sign = set_sign;
    lab.eps1 = s.end == End::Future ? 1 : -1;
    lab.eps2 = -lab.eps1 * set_sign;
    if (std::find(rep.components.begin(), rep.components.end(), lab.name()) == rep.components.end())
      rep.components.push_back(lab.name());

    if (k < 4) {
      // microlocal trajectory launched at distance ~1e-3, followed towards the set
      PhaseState q = s;
      q.x0 = 2.5e-7;
      std::vector<double> dir(n);
      for (double& x : dir) x = G(rng);
      double a = dot(dir, q.x_prime);
      for (int i = 0; i < n; ++i) dir[i] -= a * q.x_prime[i];
      double qd = boundary_dual_norm(m, q.x0, q.x_prime, dir, q.end);
      double qq = 4.0 * q.x0 / (1.0 + 4.0 * q.x0);
      q.xi_hat0 = set_sign / std::sqrt(1.0 + 4.0 * q.x0);
      q.xi_hat_prime = dir;
      for (double& x : q.xi_hat_prime) x *= std::sqrt(qq / qd);
      FlowParams local = prm;
      local.capture_radius = 0.0;
      Trajectory tr = integrate_bicharacteristic(m, q, SymbolVariant::Microlocal, local, set_sign * 1.0, 1e-11);
      for (size_t j = 1; j < tr.samples.size(); ++j) {
        double r0 = radial_distance2(m, tr.samples[j - 1].state), r1 = radial_distance2(m, tr.samples[j].state);
        double dt = std::abs(tr.samples[j].t - tr.samples[j - 1].t);
        if (dt <= 0.0) continue;
        rep.beta1_lower = std::min(rep.beta1_lower, -(std::log(r1) - std::log(r0)) / dt);
      }
    }
  }
  return rep;
}

}  // namespace dslab
