#include "dslab/geometry.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dslab/model_metric.hpp"
#include "dslab/ode.hpp"

namespace dslab {

std::string model_name(ModelKind k) {
  switch (k) {
    case ModelKind::Flat: return "flat";
    case ModelKind::ExactDS: return "exact-ds";
    case ModelKind::PerturbedDS: return "perturbed-ds";
  }
  return "unknown";
}

ModelKind parse_model(const std::string& s) {
  if (s == "flat") return ModelKind::Flat;
  if (s == "exact-ds") return ModelKind::ExactDS;
  if (s == "perturbed-ds") return ModelKind::PerturbedDS;
  fail(ErrorCode::ConfigError, "unknown model '" + s + "'");
}

void SpacetimeModel::validate() const {
  if (n < 2 || n % 2 != 0 || n > 8) fail(ErrorCode::BadParams, "n must be even, 2 <= n <= 8");
  if (!(fd_step > 0.0)) fail(ErrorCode::BadParams, "fd_step must be positive");
  if (kind == ModelKind::PerturbedDS && !(pert.width > 0.0)) fail(ErrorCode::BadParams, "bump width must be positive");
}

ChartPoint ChartPoint::collar(double x0, std::vector<double> xp, End e) {
  return {ChartKind::Collar, [&] {
            std::vector<double> c{x0};
            c.insert(c.end(), xp.begin(), xp.end());
            return c;
          }(),
          e};
}

std::vector<double> stereo_to_sphere(const std::vector<double>& u) {
  double s = 0.0;
  for (double v : u) s += v * v;
  std::vector<double> x(u.size() + 1);
  for (size_t i = 0; i < u.size(); ++i) x[i] = 2.0 * u[i] / (1.0 + s);
  x.back() = (1.0 - s) / (1.0 + s);
  return x;
}

std::vector<double> sphere_to_stereo(const std::vector<double>& x) {
  double d = 1.0 + x.back();
  if (d < 1e-8) fail(ErrorCode::OutOfChart, "point at the stereographic pole");
  std::vector<double> u(x.size() - 1);
  for (size_t i = 0; i + 1 < x.size(); ++i) u[i] = x[i] / d;
  return u;
}

double bump(double r) { return bump_t(r); }

namespace {

void check_dim(const SpacetimeModel& m, const ChartPoint& p) {
  size_t want = p.chart == ChartKind::Interior ? size_t(m.n) : size_t(m.n + 1);
  if (p.coords.size() != want) fail(ErrorCode::OutOfChart, "coordinate vector has the wrong length");
  for (double v : p.coords)
    if (!std::isfinite(v)) fail(ErrorCode::OutOfChart, "non-finite coordinate");
}

std::vector<double> collar_sphere(const SpacetimeModel& m, const ChartPoint& p) {
  std::vector<double> xp(p.coords.begin() + 1, p.coords.end());
  double r = 0.0;
  for (double v : xp) r += v * v;
  if (std::abs(std::sqrt(r) - 1.0) > 1e-9) fail(ErrorCode::OutOfChart, "x' is not a unit vector");
  (void)m;
  return xp;
}

Eigen::MatrixXd interior_matrix(const SpacetimeModel& m, const std::vector<double>& x) {
  Eigen::MatrixXd g(m.n, m.n);
  std::vector<double> buf(m.n * m.n);
  interior_metric(m, x.data(), buf.data());
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) g(i, j) = buf[i * m.n + j];
  return g;
}

}  // namespace

ChartPoint to_collar(const ChartPoint& p) {
  if (p.chart == ChartKind::Collar) return p;
  double h = p.coords.at(0);
  std::vector<double> u(p.coords.begin() + 1, p.coords.end());
  return ChartPoint::collar(std::exp(-2.0 * std::abs(h)), stereo_to_sphere(u), h >= 0.0 ? End::Future : End::Past);
}

ChartPoint to_interior(const ChartPoint& p) {
  if (p.chart == ChartKind::Interior) return p;
  double c = p.coords.at(0);
  if (!(c > 0.0) || c > 1.0) fail(ErrorCode::OutOfChart, "collar point outside the interior");
  std::vector<double> xp(p.coords.begin() + 1, p.coords.end());
  double h = -0.5 * std::log(c);
  if (p.end == End::Past) h = -h;
  std::vector<double> x{h};
  auto u = sphere_to_stereo(xp);
  x.insert(x.end(), u.begin(), u.end());
  return ChartPoint::interior(x);
}

double perturbation_ratio(const SpacetimeModel& m, double x0, End end) {
  return 4.0 * perturbation_profile(m, x0, end) / ((1.0 + x0) * (1.0 + x0));
}

Eigen::MatrixXd boundary_metric(const SpacetimeModel& m, double x0, const std::vector<double>& x_prime, End end) {
  if (m.kind == ModelKind::Flat) fail(ErrorCode::OutOfChart, "flat model has no collar");
  auto u = sphere_to_stereo(x_prime);
  const int d = m.n - 1;
  double s = 0.0;
  for (double v : u) s += v * v;
  double q = 1.0 + s;
  Eigen::MatrixXd g0 = Eigen::MatrixXd::Identity(d, d) * ((1.0 + x0) * (1.0 + x0) / (q * q));
  double prof = perturbation_profile(m, x0, end);
  if (prof != 0.0) {
    Eigen::VectorXd dx(d);
    for (int i = 0; i < d; ++i) dx(i) = (i == 0 ? 2.0 / q : 0.0) - 4.0 * u[0] * u[i] / (q * q);
    g0 += prof * dx * dx.transpose();
  }
  return g0;
}

Eigen::MatrixXd metric_eval(const SpacetimeModel& m, const ChartPoint& p) {
  m.validate();
  check_dim(m, p);
  if (p.chart == ChartKind::Interior) return interior_matrix(m, p.coords);
  if (m.kind == ModelKind::Flat) fail(ErrorCode::OutOfChart, "flat model has no collar chart");
  double c = p.coords[0];
  if (c < -m.ext_margin || c > 1.0) fail(ErrorCode::OutOfChart, "x0 outside the collar");
  if (c == 0.0) fail(ErrorCode::SingularPoint, "x0 = 0 in the un-rescaled metric");
  auto xp = collar_sphere(m, p);
  Eigen::MatrixXd g0 = boundary_metric(m, c, xp, p.end);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m.n, m.n);
  g(0, 0) = 1.0 / (4.0 * c * c);
  g.bottomRightCorner(m.n - 1, m.n - 1) = -g0 / c;
  return g;
}

std::vector<Eigen::MatrixXd> christoffel(const SpacetimeModel& m, const std::vector<double>& x) {
  return dispatch_dim(m.n, [&](auto NC) {
    constexpr int N = decltype(NC)::value;
    using D = Dual<double, N>;
    std::array<D, N> xd;
    for (int i = 0; i < N; ++i) xd[i] = D::variable(x[i], i);
    std::array<D, N * N> gd;
    interior_metric(m, xd.data(), gd.data());
    Eigen::MatrixXd g(N, N);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) g(i, j) = gd[i * N + j].v;
    Eigen::MatrixXd gi = g.inverse();
    std::vector<Eigen::MatrixXd> G(N, Eigen::MatrixXd::Zero(N, N));
    for (int k = 0; k < N; ++k)
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          double s = 0.0;
          for (int l = 0; l < N; ++l)
            s += gi(k, l) * (gd[l * N + j].d[i] + gd[l * N + i].d[j] - gd[i * N + j].d[l]);
          G[k](i, j) = 0.5 * s;
        }
    return G;
  });
}

CurvatureData curvature_data(const SpacetimeModel& m, const ChartPoint& pin) {
  m.validate();
  ChartPoint p = to_interior(pin);
  check_dim(m, p);
  const int n = m.n;
  const double s = m.fd_step;
  auto metric_at = [&](const std::vector<double>& x) {
    Eigen::MatrixXd g = interior_matrix(m, x);
    if (std::abs(g.determinant()) < 1e-12) fail(ErrorCode::DegenerateMetric, "det g vanishes at a stencil point");
    return g;
  };
  auto shifted = [&](int a, double da, int b, double db) {
    std::vector<double> x = p.coords;
    x[a] += da;
    x[b] += db;
    return metric_at(x);
  };
  const Eigen::MatrixXd g = metric_at(p.coords);
  std::vector<Eigen::MatrixXd> dg(n);
  std::vector<std::vector<Eigen::MatrixXd>> ddg(n, std::vector<Eigen::MatrixXd>(n));
  auto first = [&](int k, double st) { return Eigen::MatrixXd((shifted(k, st, k, 0) - shifted(k, -st, k, 0)) / (2 * st)); };
  auto second = [&](int k, int l, double st) {
    if (k == l) return Eigen::MatrixXd((shifted(k, st, k, 0) - 2.0 * g + shifted(k, -st, k, 0)) / (st * st));
    return Eigen::MatrixXd((shifted(k, st, l, st) - shifted(k, st, l, -st) - shifted(k, -st, l, st) +
                            shifted(k, -st, l, -st)) /
                           (4 * st * st));
  };
  for (int k = 0; k < n; ++k) {
    dg[k] = (4.0 * first(k, s) - first(k, 2 * s)) / 3.0;
    for (int l = k; l < n; ++l) {
      ddg[k][l] = (4.0 * second(k, l, s) - second(k, l, 2 * s)) / 3.0;
      ddg[l][k] = ddg[k][l];
    }
  }
  CurvatureData out;
  out.g = g;
  out.ginv = g.inverse();
  const Eigen::MatrixXd& gi = out.ginv;
  // Gamma^k_ij and its derivatives d_l Gamma^k_ij
  std::vector<Eigen::MatrixXd> G(n, Eigen::MatrixXd::Zero(n, n));
  std::vector<std::vector<Eigen::MatrixXd>> dG(n, std::vector<Eigen::MatrixXd>(n, Eigen::MatrixXd::Zero(n, n)));
  std::vector<Eigen::MatrixXd> dgi(n);
  for (int l = 0; l < n; ++l) dgi[l] = -gi * dg[l] * gi;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int a = 0; a < n; ++a) acc += gi(k, a) * (dg[i](a, j) + dg[j](a, i) - dg[a](i, j));
        G[k](i, j) = 0.5 * acc;
        for (int l = 0; l < n; ++l) {
          double t = 0.0;
          for (int a = 0; a < n; ++a) {
            t += dgi[l](k, a) * (dg[i](a, j) + dg[j](a, i) - dg[a](i, j));
            t += gi(k, a) * (ddg[l][i](a, j) + ddg[l][j](a, i) - ddg[l][a](i, j));
          }
          dG[l][k](i, j) = 0.5 * t;
        }
      }
  // R^r_{s i j} = d_i G^r_{js} - d_j G^r_{is} + G^r_{ip} G^p_{js} - G^r_{jp} G^p_{is};  Ric_{sj} = R^r_{s r j}
  Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(n, n);
  for (int sI = 0; sI < n; ++sI)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int r = 0; r < n; ++r) {
        acc += dG[r][r](j, sI) - dG[j][r](r, sI);
        for (int q = 0; q < n; ++q) acc += G[r](r, q) * G[q](j, sI) - G[r](j, q) * G[q](r, sI);
      }
      ric(sI, j) = acc;
    }
  out.gamma = G;
  out.ricci = ric;
  out.scalar = (gi.cwiseProduct(ric)).sum();
  return out;
}

double scalar_curvature(const SpacetimeModel& m, const ChartPoint& p) { return curvature_data(m, p).scalar; }

std::string geodesic_end_name(GeodesicEnd e) {
  switch (e) {
    case GeodesicEnd::ReachedYPlus: return "ReachedY+";
    case GeodesicEnd::ReachedYMinus: return "ReachedY-";
    case GeodesicEnd::MaxTime: return "MaxTime";
  }
  return "unknown";
}

std::vector<double> null_vector(const SpacetimeModel& m, const ChartPoint& pin, const std::vector<double>& dir,
                                bool future) {
  ChartPoint p = to_interior(pin);
  Eigen::MatrixXd g = metric_eval(m, p);
  const int d = m.n - 1;
  Eigen::VectorXd w(d);
  for (int i = 0; i < d; ++i) w(i) = dir.at(i);
  double q = -(w.transpose() * g.bottomRightCorner(d, d) * w)(0, 0);
  if (!(q > 0.0)) fail(ErrorCode::BadParams, "spatial direction must be nonzero");
  w /= std::sqrt(q);
  std::vector<double> v(m.n);
  v[0] = (future ? 1.0 : -1.0) / std::sqrt(g(0, 0));
  for (int i = 0; i < d; ++i) v[i + 1] = w(i);
  return v;
}

namespace {

// Conformal time T with tan(T/2) = tanh(h/2); sin T = tanh h.
double gd(double h) { return 2.0 * std::atan(std::tanh(0.5 * h)); }
double inv_gd(double T) { return 2.0 * std::atanh(std::tan(0.5 * T)); }
double collar_of_T(double T) {
  double s = std::abs(std::sin(T));
  return (1.0 - s) / (1.0 + s);
}

// W(T) = 1 / (x0_s cosh^2 h) and its T-derivative.
std::pair<double, double> conformal_weight(double T) {
  static const double T05 = gd(0.5);
  if (std::abs(T) >= T05) {
    double s = std::abs(std::sin(T));
    double sg = std::sin(T) >= 0 ? 1.0 : -1.0;
    return {(1 + s) * (1 + s), 2 * (1 + s) * sg * std::cos(T)};
  }
  using D = Dual<double, 1>;
  D hd(inv_gd(T));
  hd.d[0] = 1.0 / std::cos(T);
  D Td = D::variable(T, 0);
  D cT = cos(Td);
  D W = cT * cT / smooth_bdf(hd);
  return {W.v, W.d[0]};
}

// Sphere coupling k(T) and dk/dT (future half only).
std::pair<double, double> coupling(const SpacetimeModel& m, double T) {
  if (m.kind != ModelKind::PerturbedDS || T <= 0.0) return {0.0, 0.0};
  using D = Dual<double, 1>;
  double c = collar_of_T(T);
  D cd(c);
  cd.d[0] = -2.0 * c / std::cos(T);
  D k = 4.0 * perturbation_profile(m, cd, End::Future) / ((1.0 + cd) * (1.0 + cd));
  return {k.v, k.d[0]};
}

// Q(x, xi; k) = |x|^2|xi|^2 - (x.xi)^2 - k (t.xi)^2 / (1 + k|t|^2), t = |x|^2 e1 - x1 x.
template <class T>
T sphere_quadratic(int n, const T* x, const T* xi, const T& k) {
  T xx(0.0), ee(0.0), xe(0.0);
  for (int i = 0; i < n; ++i) {
    xx += x[i] * x[i];
    ee += xi[i] * xi[i];
    xe += x[i] * xi[i];
  }
  T te(0.0), tt(0.0);
  for (int i = 0; i < n; ++i) {
    T ti = (i == 0 ? xx : T(0.0)) - x[0] * x[i];
    te += ti * xi[i];
    tt += ti * ti;
  }
  return xx * ee - xe * xe - k * te * te / (1.0 + k * tt);
}

struct SphereGrad {
  double q;
  std::vector<double> dx, dxi;
  double dk;
};

SphereGrad sphere_gradient(int n, const double* x, const double* xi, double k) {
  return dispatch_dim(n, [&](auto NC) {
    constexpr int N = decltype(NC)::value;
    using D = Dual<double, 2 * N + 1>;
    std::array<D, N> xd, ed;
    for (int i = 0; i < N; ++i) {
      xd[i] = D::variable(x[i], i);
      ed[i] = D::variable(xi[i], N + i);
    }
    D kd = D::variable(k, 2 * N);
    D q = sphere_quadratic(N, xd.data(), ed.data(), kd);
    SphereGrad g{q.v, std::vector<double>(N), std::vector<double>(N), q.d[2 * N]};
    for (int i = 0; i < N; ++i) {
      g.dx[i] = q.d[i];
      g.dxi[i] = q.d[N + i];
    }
    return g;
  });
}

}  // namespace

GeodesicPath geodesic_trajectory(const SpacetimeModel& m, const ChartPoint& pin, const std::vector<double>& v,
                                 double t_max, double tol, const GeodesicOptions& opt) {
  m.validate();
  ChartPoint p = to_interior(pin);
  check_dim(m, p);
  const int n = m.n;
  if (int(v.size()) != n) fail(ErrorCode::BadParams, "velocity has the wrong length");
  double vn = 0.0;
  for (double a : v) vn += a * a;
  if (vn == 0.0) fail(ErrorCode::BadParams, "zero initial velocity");
  GeodesicPath path;

  if (m.kind == ModelKind::Flat) {
    Eigen::MatrixXd g = metric_eval(m, p);
    Eigen::VectorXd vv = Eigen::Map<const Eigen::VectorXd>(v.data(), n);
    Eigen::VectorXd xi = g * vv;
    const int steps = 16;
    for (int i = 0; i <= steps; ++i) {
      double t = t_max * i / steps;
      GeodesicSample smp{t, 1.0, p.coords[0] + t * v[0], {}, {}};
      for (int j = 0; j < n; ++j) smp.x_prime.push_back(p.coords[j] + t * v[j]);
      for (int j = 0; j < n; ++j) smp.xi.push_back(xi(j));
      path.samples.push_back(smp);
    }
    path.terminal = GeodesicEnd::MaxTime;
    return path;
  }

  // Initial data in (T, x) with x on the unit sphere of R^n.
  const double h0 = p.coords[0];
  std::vector<double> u(p.coords.begin() + 1, p.coords.end());
  std::vector<double> x = stereo_to_sphere(u);
  double s = 0.0;
  for (double a : u) s += a * a;
  const double qd = 1.0 + s;
  std::vector<double> xdot(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n - 1; ++j) {
      double J = (i < n - 1) ? ((i == j ? 2.0 / qd : 0.0) - 4.0 * u[i] * u[j] / (qd * qd)) : -4.0 * u[j] / (qd * qd);
      xdot[i] += J * v[j + 1];
    }
  const double T0 = gd(h0);
  const double Tdot = v[0] / std::cosh(h0);
  auto [W0, dW0] = conformal_weight(T0);
  (void)dW0;
  auto [k0, dk0] = coupling(m, T0);
  (void)dk0;
  std::vector<double> tv(n);
  double txd = 0.0;
  for (int i = 0; i < n; ++i) {
    tv[i] = (i == 0 ? 1.0 : 0.0) - x[0] * x[i];
    txd += tv[i] * xdot[i];
  }
  ode::State y(2 * n + 2);
  y[0] = T0;
  for (int i = 0; i < n; ++i) y[1 + i] = x[i];
  y[n + 1] = Tdot / W0;
  for (int i = 0; i < n; ++i) y[n + 2 + i] = -(xdot[i] + k0 * txd * tv[i]) / W0;

  auto hamiltonian2 = [&](const ode::State& st, double* scale) {
    auto [W, dW] = conformal_weight(st[0]);
    (void)dW;
    auto [k, dk] = coupling(m, st[0]);
    (void)dk;
    double Q = sphere_gradient(n, &st[1], &st[n + 2], k).q;
    if (scale) *scale = W * (st[n + 1] * st[n + 1] + std::abs(Q));
    return W * (st[n + 1] * st[n + 1] - Q);
  };

  auto rhs = [&](double, const ode::State& st, ode::State& dy) {
    const double T = st[0];
    auto [W, dW] = conformal_weight(T);
    auto [k, dk] = coupling(m, T);
    SphereGrad sg = sphere_gradient(n, &st[1], &st[n + 2], k);
    const double xiT = st[n + 1];
    const double K = xiT * xiT - sg.q;
    dy[0] = W * xiT;
    dy[n + 1] = -0.5 * (dW * K - W * sg.dk * dk);
    for (int i = 0; i < n; ++i) {
      dy[1 + i] = -0.5 * W * sg.dxi[i];
      dy[n + 2 + i] = 0.5 * W * sg.dx[i];
    }
  };

  double scale0 = 0.0;
  const double H0 = hamiltonian2(y, &scale0);
  auto record = [&](double t, const ode::State& st) {
    GeodesicSample smp;
    smp.t = t;
    smp.x0 = collar_of_T(st[0]);
    smp.h = std::abs(st[0]) < 0.5 * kPi ? inv_gd(st[0]) : (st[0] > 0 ? INFINITY : -INFINITY);
    smp.x_prime.assign(st.begin() + 1, st.begin() + 1 + n);
    smp.xi.assign(st.begin() + n + 1, st.end());
    if (int(path.samples.size()) < opt.max_samples) path.samples.push_back(smp);
  };
  record(0.0, y);

  auto hook = [&](double t, ode::State& st) {
    double r = 0.0;
    for (int i = 0; i < n; ++i) r += st[1 + i] * st[1 + i];
    r = std::sqrt(r);
    double xe = 0.0;
    for (int i = 0; i < n; ++i) {
      st[1 + i] /= r;
      xe += st[1 + i] * st[n + 2 + i];
    }
    for (int i = 0; i < n; ++i) st[n + 2 + i] -= xe * st[1 + i];
    double sc = 0.0;
    double H = hamiltonian2(st, &sc);
    path.max_relative_drift = std::max(path.max_relative_drift, std::abs(H - H0) / std::max(sc, scale0));
    record(t, st);
    const double T = st[0];
    if (std::abs(T) >= 0.5 * kPi || collar_of_T(T) < opt.boundary_tol) {
      path.terminal = T > 0 ? GeodesicEnd::ReachedYPlus : GeodesicEnd::ReachedYMinus;
      return true;
    }
    return false;
  };

  ode::Options o;
  o.rtol = tol;
  o.atol = tol * 1e-2;
  o.h0 = 1e-3;
  o.hmax = 0.05;
  ode::dopri5(rhs, 0.0, y, t_max, o, hook);
  return path;
}

void write_geodesic_csv(const GeodesicPath& path, const std::string& file) {
  std::ofstream out(file);
  if (!out) fail(ErrorCode::ConfigError, "cannot write " + file);
  if (path.samples.empty()) return;
  const size_t n = path.samples[0].x_prime.size();
  out << "t,x0";
  for (size_t i = 0; i < n; ++i) out << ",xp" << i + 1;
  for (size_t i = 0; i < path.samples[0].xi.size(); ++i) out << ",xi" << i;
  out << ",terminal_label\n";
  out.precision(17);
  for (const auto& s : path.samples) {
    out << s.t << ',' << s.x0;
    for (double v : s.x_prime) out << ',' << v;
    for (double v : s.xi) out << ',' << v;
    out << ',' << geodesic_end_name(path.terminal) << '\n';
  }
}

}  // namespace dslab
