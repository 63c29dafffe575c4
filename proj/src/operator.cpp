#include "dslab/operator.hpp"

#include <cmath>
#include <random>

#include "dslab/error.hpp"

namespace dslab {

cplx lambda_of_z(cplx z, int n) {
  const double a = 0.25 * (n - 1) * (n - 1);
  cplx w = std::sqrt(-z - a);
  if (w.imag() < 0.0 || (w.imag() == 0.0 && w.real() < 0.0)) w = -w;
  return w;
}

cplx z_of_lambda(cplx lambda, int n) { return -lambda * lambda - 0.25 * (n - 1) * (n - 1); }

SpectralParams SpectralParams::from_z(cplx z, int n) {
  SpectralParams p;
  p.z = z;
  p.lambda = lambda_of_z(z, n);
  return p;
}

namespace {

double log_J(const SpacetimeModel& m, double x0, const std::vector<double>& xp, End end) {
  double d = boundary_metric(m, x0, xp, end).determinant();
  if (!(d > 0.0)) fail(ErrorCode::DegenerateMetric, "det g0 is not positive");
  return 0.5 * std::log(d);
}

std::vector<double> stereo_jacobian_T(const std::vector<double>& u, const std::vector<double>& xi_amb) {
  // (d x'/d u)^T xi'
  const int d = int(u.size());
  double s = 0.0;
  for (double v : u) s += v * v;
  const double q = 1.0 + s;
  std::vector<double> out(d, 0.0);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) out[j] += ((i == j ? 2.0 / q : 0.0) - 4.0 * u[i] * u[j] / (q * q)) * xi_amb[i];
    out[j] += -4.0 * u[j] / (q * q) * xi_amb[d];
  }
  return out;
}

using CoordFn = std::function<cplx(const std::vector<double>&)>;
using MetricFn = std::function<Eigen::MatrixXd(const std::vector<double>&)>;

cplx d1(const CoordFn& f, std::vector<double> x, int i, double h) {
  const double x_i = x[i];
  auto at = [&](double o) {
    x[i] = x_i + o;
    return f(x);
  };
  return (at(-2 * h) - 8.0 * at(-h) + 8.0 * at(h) - at(2 * h)) / (12.0 * h);
}

// |g|^{-1/2} d_i (|g|^{1/2} g^{ij} d_j f) by nested 4th-order differences.
cplx box_fd(const MetricFn& metric, const CoordFn& f, const std::vector<double>& x, double h) {
  const int n = int(x.size());
  auto flux = [&](const std::vector<double>& y, int i) {
    Eigen::MatrixXd g = metric(y);
    Eigen::MatrixXd gi = g.inverse();
    double vol = std::sqrt(std::abs(g.determinant()));
    cplx acc = 0.0;
    for (int j = 0; j < n; ++j)
      if (gi(i, j) != 0.0) acc += gi(i, j) * d1(f, y, j, h);
    return vol * acc;
  };
  cplx div = 0.0;
  for (int i = 0; i < n; ++i) div += d1([&](const std::vector<double>& y) { return flux(y, i); }, x, i, h);
  return div / std::sqrt(std::abs(metric(x).determinant()));
}

}  // namespace

double gamma_coeff(const SpacetimeModel& m, double x0, const std::vector<double>& x_prime, End end) {
  const double h = m.fd_step;
  auto L = [&](double c) { return log_J(m, c, x_prime, end); };
  return (L(x0 - 2 * h) - 8 * L(x0 - h) + 8 * L(x0 + h) - L(x0 + 2 * h)) / (12 * h);
}

CollarOperatorCoeffs collar_coeffs(const SpacetimeModel& m, double x0, const std::vector<double>& x_prime, End end,
                                   cplx lambda) {
  const cplx I(0.0, 1.0);
  CollarOperatorCoeffs c;
  c.gamma = gamma_coeff(m, x0, x_prime, end);
  c.a2 = 4.0 * x0;
  c.a1 = 4.0 * (1.0 - I * lambda) + 4.0 * x0 * c.gamma;
  c.a0 = c.gamma * (double(m.n - 1) - 2.0 * I * lambda);
  c.laplacian_weight = -1.0;
  return c;
}

double boundary_dual_norm(const SpacetimeModel& m, double x0, const std::vector<double>& xp,
                          const std::vector<double>& xi, End end) {
  if (m.kind == ModelKind::Flat) fail(ErrorCode::OutOfChart, "flat model has no collar");
  const int n = m.n;
  const double a = 0.25 * (1.0 + x0) * (1.0 + x0);
  const double k = perturbation_profile(m, x0, end) / a;
  double xx = 0.0, ee = 0.0, xe = 0.0, te = 0.0, tt = 0.0;
  for (int i = 0; i < n; ++i) {
    xx += xp[i] * xp[i];
    ee += xi[i] * xi[i];
    xe += xp[i] * xi[i];
  }
  for (int i = 0; i < n; ++i) {
    double ti = (i == 0 ? xx : 0.0) - xp[0] * xp[i];
    te += ti * xi[i];
    tt += ti * ti;
  }
  return (xx * ee - xe * xe - k * te * te / (1.0 + k * tt)) / a;
}

double principal_symbol_boundary(const SpacetimeModel& m, double x0, const std::vector<double>& xp, double xi0,
                                 const std::vector<double>& xi_prime, End end) {
  return -4.0 * x0 * xi0 * xi0 + boundary_dual_norm(m, x0, xp, xi_prime, end);
}

double interior_bdf(const SpacetimeModel& m, const std::vector<double>& x) {
  if (m.kind == ModelKind::Flat) return 1.0;
  return smooth_bdf(x.at(0));
}

std::vector<double> collar_covector_to_interior(const ChartPoint& cp, const std::vector<double>& xi) {
  const double c = cp.coords.at(0);
  std::vector<double> xp(cp.coords.begin() + 1, cp.coords.end());
  auto u = sphere_to_stereo(xp);
  const double dcdh = cp.end == End::Future ? -2.0 * c : 2.0 * c;
  std::vector<double> out{xi.at(0) * dcdh};
  std::vector<double> amb(xi.begin() + 1, xi.end());
  auto s = stereo_jacobian_T(u, amb);
  out.insert(out.end(), s.begin(), s.end());
  return out;
}

double semiclassical_symbol(const SpacetimeModel& m, const ChartPoint& p, const std::vector<double>& xi,
                            double omega_R) {
  const int n = m.n;
  if (p.chart == ChartKind::Collar) {
    const double c = p.coords.at(0);
    std::vector<double> xp(p.coords.begin() + 1, p.coords.end());
    std::vector<double> xip(xi.begin() + 1, xi.end());
    double al, be, ga;
    symbol_profile(c, al, be, ga);
    return al * principal_symbol_boundary(m, c, xp, xi.at(0), xip, p.end) + omega_R * be * xi[0] +
           omega_R * omega_R * ga;
  }
  Eigen::MatrixXd gi = metric_eval(m, p).inverse();
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(xi.data(), n);
  double x0 = 1.0, dx0 = 0.0;
  if (m.kind != ModelKind::Flat) {
    Dual<double, 1> hd = Dual<double, 1>::variable(p.coords[0], 0);
    auto xs = smooth_bdf(hd);
    x0 = xs.v;
    dx0 = xs.d[0];
  }
  if (!(x0 > 0.0)) fail(ErrorCode::SingularPoint, "x0 vanishes");
  double xi2 = v.dot(gi * v);
  double dx2 = gi(0, 0) * dx0 * dx0;
  double gdx = dx0 * gi.row(0).dot(v);
  return (-xi2 + omega_R * omega_R * (1.0 - dx2 / (4.0 * x0 * x0)) + omega_R * gdx / x0) / x0;
}

FGCorrections fg_corrections(const SpacetimeModel& m, const ChartPoint& pin) {
  ChartPoint p = to_interior(pin);
  const int n = m.n;
  const double h = m.fd_step;
  const double x0 = interior_bdf(m, p.coords);
  if (!(x0 > 0.0)) fail(ErrorCode::SingularPoint, "x0 vanishes");
  CoordFn X0 = [&](const std::vector<double>& y) { return cplx(interior_bdf(m, y), 0.0); };
  MetricFn G = [&](const std::vector<double>& y) { return metric_eval(m, ChartPoint::interior(y)); };
  Eigen::MatrixXd gi = G(p.coords).inverse();
  Eigen::VectorXd dx(n);
  for (int i = 0; i < n; ++i) dx(i) = d1(X0, p.coords, i, h).real();
  FGCorrections out;
  out.F = dx.dot(gi * dx) / (x0 * x0);
  Eigen::VectorXd gv = 2.0 * gi * dx / x0;
  out.G_vec.assign(gv.data(), gv.data() + n);
  out.G0 = box_fd(G, X0, p.coords, h).real() / x0;
  return out;
}

ImSymbolCheck check_im_symbol_identity(const SpacetimeModel& m, const ChartPoint& pin, const std::vector<double>& xi,
                                       const SpectralParams& sp, const ImSymbolOptions& opt) {
  ChartPoint p = to_interior(pin);
  const int n = m.n;
  const double x0 = interior_bdf(m, p.coords);
  if (!(x0 > 0.0)) fail(ErrorCode::SingularPoint, "x0 vanishes");
  FGCorrections fg = fg_corrections(m, p);
  Eigen::MatrixXd gi = metric_eval(m, p).inverse();
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(xi.data(), n);
  const double xi2 = v.dot(gi * v);
  double Gxi = 0.0;
  for (int j = 0; j < n; ++j) Gxi += fg.G_vec[j] * xi[j];
  const cplx I(0.0, 1.0);
  // Full semiclassical symbol of P_h(omega), symbol convention d -> i xi / h.
  auto full = [&](double hh, cplx w) {
    cplx be = 0.25 * (n - 1) * hh - 0.5 * I * w;
    return (-xi2 + w * w + hh * hh * 0.25 * (n - 1) * (n - 1) + be * (be - hh) * fg.F + I * be * Gxi +
            be * hh * fg.G0) /
           x0;
  };
  auto diff = [&](double hh) {
    return (full(hh, sp.omega_R + I * hh * sp.omega_I) - full(hh, cplx(sp.omega_R, 0.0))) / I;
  };
  // the difference is a quadratic polynomial in h without constant term
  ImSymbolCheck r;
  r.lhs = (0.5 * (diff(1.0) - diff(-1.0))).real();
  const double d = opt.omega_step;
  auto pw = [&](double w) { return semiclassical_symbol(m, p, xi, w); };
  double deriv;
  if (opt.forward_difference) {
    deriv = (pw(sp.omega_R + d) - pw(sp.omega_R)) / d;
  } else {
    double c1 = (pw(sp.omega_R + d) - pw(sp.omega_R - d)) / (2 * d);
    double c2 = (pw(sp.omega_R + 2 * d) - pw(sp.omega_R - 2 * d)) / (4 * d);
    deriv = (4 * c1 - c2) / 3.0;
  }
  r.rhs = sp.omega_I * deriv;
  r.residual = std::abs(r.lhs - r.rhs);
  return r;
}

cplx apply_collar_form(const SpacetimeModel& m, cplx lambda, const CollarFunction& f, double x0,
                       const std::vector<double>& u, End end, double step) {
  auto xp = stereo_to_sphere(u);
  CollarOperatorCoeffs c = collar_coeffs(m, x0, xp, end, lambda);
  CoordFn F = [&](const std::vector<double>& y) { return f(y[0], std::vector<double>(y.begin() + 1, y.end())); };
  std::vector<double> y{x0};
  y.insert(y.end(), u.begin(), u.end());
  const double h = step;
  auto at = [&](double o) { return f(x0 + o, u); };
  cplx f0 = at(0.0);
  cplx fc = (at(-2 * h) - 8.0 * at(-h) + 8.0 * at(h) - at(2 * h)) / (12 * h);
  cplx fcc = (-at(-2 * h) + 16.0 * at(-h) - 30.0 * f0 + 16.0 * at(h) - at(2 * h)) / (12 * h * h);
  // Laplace-Beltrami of g0 in the stereographic coordinates at fixed x0
  MetricFn G0 = [&](const std::vector<double>& w) { return boundary_metric(m, x0, stereo_to_sphere(w), end); };
  CoordFn Fu = [&](const std::vector<double>& w) { return f(x0, w); };
  cplx lap = box_fd(G0, Fu, u, h);
  return c.a2 * fcc + c.a1 * fc + c.a0 * f0 + c.laplacian_weight * lap;
}

cplx apply_conjugated_form(const SpacetimeModel& m, cplx lambda, const CollarFunction& f, double x0,
                           const std::vector<double>& u, End end, double step) {
  const int n = m.n;
  const cplx I(0.0, 1.0);
  const cplx right = 0.25 * (n - 1) - 0.5 * I * lambda;
  const cplx left = 0.5 * I * lambda - 0.25 * (n + 3);
  MetricFn G = [&](const std::vector<double>& y) {
    std::vector<double> xp = stereo_to_sphere(std::vector<double>(y.begin() + 1, y.end()));
    return metric_eval(m, ChartPoint::collar(y[0], xp, end));
  };
  CoordFn W = [&](const std::vector<double>& y) {
    return std::pow(cplx(y[0], 0.0), right) * f(y[0], std::vector<double>(y.begin() + 1, y.end()));
  };
  std::vector<double> y{x0};
  y.insert(y.end(), u.begin(), u.end());
  cplx box = box_fd(G, W, y, step);
  return std::pow(cplx(x0, 0.0), left) * (box + (lambda * lambda + 0.25 * (n - 1) * (n - 1)) * W(y));
}

AdjointCheck adjoint_residual(const SpacetimeModel& m, double x0, const std::vector<double>& xp, End end,
                              cplx lambda) {
  const double h = m.fd_step;
  CollarOperatorCoeffs P = collar_coeffs(m, x0, xp, end, lambda);
  CollarOperatorCoeffs Pb = collar_coeffs(m, x0, xp, end, std::conj(lambda));
  const double g = P.gamma;
  const double dg = (gamma_coeff(m, x0 + h, xp, end) - gamma_coeff(m, x0 - h, xp, end)) / (2 * h);
  // Formal adjoint of a2 d^2 + b1 d + b0 with respect to J: J^{-1}[(a2 J u)'' - (b1 J u)'] + b0 u.
  const double a2 = Pb.a2, a2p = 4.0, a2pp = 0.0;
  const cplx b1 = std::conj(Pb.a1);
  const cplx b1p = 4.0 * g + 4.0 * x0 * dg;  // x0-derivative of the conjugated first-order coefficient
  const cplx b0 = std::conj(Pb.a0);
  const cplx adj1 = 2.0 * (a2p + a2 * g) - b1;
  const cplx adj0 = a2pp + 2.0 * a2p * g + a2 * (dg + g * g) - (b1p + b1 * g) + b0;
  return {P.a1 - adj1, P.a0 - adj0};
}

SymbolCheckReport run_symbol_checks(const SpacetimeModel& m, int n_samples, std::uint64_t seed, double tol,
                                    double branch_tol, double adjoint_tol) {
  if (n_samples < 1) fail(ErrorCode::BadParams, "n_samples must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const int n = m.n;
  SymbolCheckReport rep;
  rep.n_samples = n_samples;
  double sum = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    std::vector<double> x(n), xi(n);
    x[0] = 1.5 * U(rng);
    for (int i = 1; i < n; ++i) x[i] = U(rng);
    for (auto& v : xi) v = U(rng);
    SpectralParams sp;
    sp.omega_R = 2.0 * U(rng);
    sp.omega_I = U(rng);
    const ImSymbolCheck r = check_im_symbol_identity(m, ChartPoint::interior(x), xi, sp);
    sum += r.residual;
    rep.max_residual = std::max(rep.max_residual, r.residual);
    if (!(r.residual < tol)) rep.failures.push_back({"im_symbol", x, xi, sp.omega_R, sp.omega_I, r.residual});

    if (m.kind == ModelKind::Flat) continue;
    std::vector<double> u(n - 1), xc(n + 1);
    for (auto& v : u) v = U(rng);
    const double x0 = 0.525 + 0.375 * U(rng);
    const End end = U(rng) > 0.0 ? End::Future : End::Past;
    const ChartPoint cp = ChartPoint::collar(x0, stereo_to_sphere(u), end);
    for (auto& v : xc) v = U(rng);
    const double a = semiclassical_symbol(m, cp, xc, sp.omega_R);
    const double b = semiclassical_symbol(m, to_interior(cp), collar_covector_to_interior(cp, xc), sp.omega_R);
    const double d = std::abs(a - b);
    rep.max_branch_diff = std::max(rep.max_branch_diff, d);
    if (!(d < branch_tol)) rep.failures.push_back({"branch", cp.coords, xc, sp.omega_R, 0.0, d});

    const double xa = 0.2 * U(rng);
    const AdjointCheck adj = adjoint_residual(m, xa, stereo_to_sphere(u), end, cplx(2.0 * U(rng), 0.0));
    const double ad = std::max(std::abs(adj.first_order_residual), std::abs(adj.zeroth_order_residual));
    rep.max_adjoint = std::max(rep.max_adjoint, ad);
    if (!(ad < adjoint_tol)) rep.failures.push_back({"adjoint", cp.coords, {}, 0.0, 0.0, ad});
  }
  rep.mean_residual = sum / n_samples;
  return rep;
}

}  // namespace dslab
