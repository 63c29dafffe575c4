#include "dslab/powers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dslab/error.hpp"

namespace dslab {

namespace {

constexpr cplx kI{0.0, 1.0};

double dist_point_segment(cplx p, cplx a, cplx b) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - a);
  double s = std::real((p - a) * std::conj(d)) / len2;
  s = std::clamp(s, 0.0, 1.0);
  return std::abs(p - (a + s * d));
}

// Distance from segment [a, b] to the real half-line (-inf, r].
double dist_segment_halfline(cplx a, cplx b, double r) {
  if (a.imag() * b.imag() <= 0.0) {
    const double s = a.imag() == b.imag() ? 0.0 : a.imag() / (a.imag() - b.imag());
    const double x = a.real() + s * (b.real() - a.real());
    if (x <= r) return 0.0;
  }
  auto to_line = [r](cplx p) { return p.real() <= r ? std::abs(p.imag()) : std::abs(p - cplx(r, 0.0)); };
  return std::min({to_line(a), to_line(b), dist_point_segment(cplx(r, 0.0), a, b)});
}

int gauss_order(double tol) {
  const int m = static_cast<int>(std::ceil(-std::log10(tol))) + 4;
  return std::clamp(m, 8, 40);
}

}  // namespace

cplx ContourSpec::branch(double t) const {
  const double s = std::sqrt(0.5 * epsilon);
  const cplx w = t + cplx(s, s) + kI * (t < 0.0 ? C : c);
  return -w * w - 0.25 * (n - 1.0) * (n - 1.0);
}

cplx ContourSpec::branch_derivative(double t) const {
  const double s = std::sqrt(0.5 * epsilon);
  const cplx w = t + cplx(s, s) + kI * (t < 0.0 ? C : c);
  return -2.0 * w;
}

double ContourSpec::cap_min_abs_imag() const {
  double r = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < z.size(); ++j)
    if (piece[j] == ContourPiece::Cap) r = std::min(r, std::abs(z[j].imag()));
  return r;
}

double ContourSpec::cap_min_distance_to_pole() const {
  double r = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < z.size(); ++j)
    if (piece[j] == ContourPiece::Cap) r = std::min(r, std::abs(z[j] - kI * epsilon));
  return r;
}

double ContourSpec::tail_envelope_ratio() const {
  const cplx zt = branch(t_cut);
  const double norm = std::abs(1.0 / (zt - kI * epsilon)) * std::abs(branch_derivative(t_cut)) / std::abs(zt.imag());
  const double envelope = 1.0 / ((c + epsilon / std::sqrt(2.0)) * t_cut * t_cut);
  return norm / envelope;
}

ContourSpec build_contour(double epsilon, double eta, double C, double c, double quad_tol, int n, double x_right) {
  if (!(C > c && c > 0.0)) fail(ErrorCode::BadParams, "contour needs C > c > 0");
  if (!(epsilon > 0.0)) fail(ErrorCode::BadParams, "contour needs epsilon > 0");
  if (!(eta > 0.0)) fail(ErrorCode::BadParams, "contour needs eta > 0");
  if (!(quad_tol > 0.0 && quad_tol < 1.0)) fail(ErrorCode::BadParams, "quad_tol must lie in (0, 1)");

  ContourSpec s;
  s.epsilon = epsilon;
  s.eta = eta;
  s.C = C;
  s.c = c;
  s.n = n;
  s.x_right = x_right;
  s.quad_tol = quad_tol;
  s.t_cut = std::max(2.0 / ((c + epsilon / std::sqrt(2.0)) * quad_tol), 4.0 * eta);
  s.order = gauss_order(quad_tol);

  const cplx p0 = s.branch(-eta);
  const cplx p4 = s.branch(eta);
  if (!(p0.real() < 0.0)) fail(ErrorCode::BadParams, "gamma(-eta) must lie left of the imaginary axis; increase eta");
  if (!(p0.imag() > epsilon)) fail(ErrorCode::BadParams, "gamma(-eta) must lie above i epsilon");
  if (!(p4.imag() < 0.0)) fail(ErrorCode::BadParams, "gamma(eta) must lie in the lower half-plane");
  if (!(x_right > std::max(p4.real(), 0.0))) fail(ErrorCode::BadParams, "x_right must exceed Re gamma(eta) and 0");

  const double hcap = 0.5 * epsilon;
  s.cap_vertices = {p0, cplx(p0.real(), hcap), cplx(x_right, hcap), cplx(x_right, p4.imag()), p4};

  const GaussRule& g = gauss_legendre(s.order);
  const int m = s.order;

  auto add_branch = [&](double sgn, ContourPiece piece) {
    double a = eta;
    while (a < s.t_cut) {
      const double b = std::min(a + std::max(1.0, 0.5 * a), s.t_cut);
      const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
      for (int j = 0; j < m; ++j) {
        const double t = sgn * (mid + half * g.x[j]);
        s.z.push_back(s.branch(t));
        s.dz.push_back(s.branch_derivative(t) * (half * g.w[j] * sgn));
        s.spacing.push_back(std::abs(s.branch_derivative(t)) * (b - a) / m);
        s.piece.push_back(piece);
      }
      a = b;
    }
  };

  // Upper branch traversed from -t_cut towards -eta.
  add_branch(-1.0, ContourPiece::Upper);
  std::reverse(s.z.begin(), s.z.end());
  std::reverse(s.dz.begin(), s.dz.end());
  std::reverse(s.spacing.begin(), s.spacing.end());
  for (auto& w : s.dz) w = -w;

  const cplx pole = kI * epsilon;
  const double floor_len = epsilon / 8.0;
  std::function<void(cplx, cplx)> panel = [&](cplx a, cplx b) {
    const double len = std::abs(b - a);
    const double d = std::min(dist_point_segment(pole, a, b), dist_segment_halfline(a, b, x_right - 1.0));
    if (len > std::max(0.5 * d, floor_len) || len > 2.0) {
      const cplx mid = 0.5 * (a + b);
      panel(a, mid);
      panel(mid, b);
      return;
    }
    const cplx half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int j = 0; j < m; ++j) {
      s.z.push_back(mid + half * g.x[j]);
      s.dz.push_back(half * g.w[j]);
      s.spacing.push_back(len / m);
      s.piece.push_back(ContourPiece::Cap);
    }
  };
  for (size_t v = 0; v + 1 < s.cap_vertices.size(); ++v) panel(s.cap_vertices[v], s.cap_vertices[v + 1]);

  add_branch(1.0, ContourPiece::Lower);
  return s;
}

cplx power_upper_cut(cplx w, cplx alpha) {
  if (w == cplx(0.0, 0.0)) fail(ErrorCode::SingularPoint, "power at the branch point");
  double theta = std::arg(w);
  if (theta > 0.5 * kPi) theta -= 2.0 * kPi;
  return std::exp(-alpha * cplx(std::log(std::abs(w)), theta));
}

cplx contour_integral(const ContourSpec& spec, cplx alpha, const std::function<cplx(cplx)>& f) {
  cplx sum = 0.0;
  const cplx pole = kI * spec.epsilon;
  for (size_t j = 0; j < spec.z.size(); ++j) sum += power_upper_cut(spec.z[j] - pole, alpha) * f(spec.z[j]) * spec.dz[j];
  return sum / (2.0 * kPi * kI);
}

cplx closed_loop_integral(const ContourSpec& spec, const std::function<cplx(cplx)>& f) {
  cplx sum = 0.0;
  for (size_t j = 0; j < spec.z.size(); ++j) sum += f(spec.z[j]) * spec.dz[j];
  const cplx a = spec.branch(spec.t_cut), b = spec.branch(-spec.t_cut);
  const GaussRule& g = gauss_legendre(spec.order);
  const int pieces = 64;
  for (int p = 0; p < pieces; ++p) {
    const cplx pa = a + (b - a) * (double(p) / pieces), pb = a + (b - a) * (double(p + 1) / pieces);
    const cplx half = 0.5 * (pb - pa), mid = 0.5 * (pa + pb);
    for (int j = 0; j < spec.order; ++j) sum += f(mid + half * g.x[j]) * half * g.w[j];
  }
  return sum;
}

cplx scalar_power_via_contour(double q, cplx alpha, const ContourSpec& spec, int k) {
  if (alpha.real() < 1.0) fail(ErrorCode::BadParams, "scalar power needs Re alpha >= 1");
  if (k < 0) fail(ErrorCode::BadParams, "k must be >= 0");
  if (!(q < spec.x_right)) fail(ErrorCode::BadParams, "q lies outside the region enclosed by the contour");
  for (size_t j = 0; j < spec.z.size(); ++j)
    if (std::abs(spec.z[j] - q) < 10.0 * spec.spacing[j])
      fail(ErrorCode::PoleTooClose, "q = " + std::to_string(q) + " is within 10 node spacings of the contour");
  const double kf = std::tgamma(k + 1.0);
  return contour_integral(spec, alpha, [&](cplx z) { return kf * std::pow(cplx(q) - z, -(k + 1)); });
}

cplx fk_contour_coefficient(cplx alpha, int k) {
  if (k < 0) fail(ErrorCode::BadParams, "k must be >= 0");
  cplx ff = 1.0;
  for (int j = 0; j < k; ++j) ff *= -alpha - double(j);
  const cplx r = (k % 2 ? -1.0 : 1.0) * ff * complex_rgamma(alpha + double(k));
  if (!std::isfinite(r.real()) || !std::isfinite(r.imag()))
    fail(ErrorCode::SingularCoefficient, "Gamma ratio is not finite");
  return r;
}

FlatDiagValue flat_diag_F_checked(cplx beta, cplx z, int n) {
  if (n < 2 || n % 2) fail(ErrorCode::BadParams, "n must be even and >= 2");
  if (z.imag() == 0.0) fail(ErrorCode::BadParams, "flat_diag_F needs Im z != 0");
  FlatDiagValue out;
  const cplx g = beta + 1.0 - 0.5 * n;
  if (is_gamma_pole(g)) {
    out.pole = true;
    out.value = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
    return out;
  }
  const double sgn = z.imag() > 0.0 ? 1.0 : -1.0;
  const double norm = std::pow(2.0, n) * std::pow(kPi, 0.5 * n);
  out.value = sgn * kI * complex_gamma(g) * std::pow(-z, 0.5 * n - beta - 1.0) / norm;
  return out;
}

cplx flat_diag_F(cplx beta, cplx z, int n) {
  const FlatDiagValue v = flat_diag_F_checked(beta, z, n);
  if (v.pole) fail(ErrorCode::PoleInBeta, "Gamma(beta + 1 - n/2) has a pole");
  return v.value;
}

cplx hadamard_power_diag(const std::vector<double>& u_diag, cplx alpha, cplx z_shift, int n, int N) {
  if (N < 0 || static_cast<size_t>(N) >= u_diag.size()) fail(ErrorCode::BadParams, "u_diag shorter than N + 1");
  cplx sum = 0.0;
  for (int k = 0; k <= N; ++k) {
    if (u_diag[k] == 0.0) continue;
    const cplx ck = fk_contour_coefficient(alpha, k);
    if (ck == cplx(0.0, 0.0)) continue;
    sum += u_diag[k] * ck * flat_diag_F(alpha + double(k) - 1.0, z_shift, n);
  }
  return sum;
}

cplx residue_at(const std::function<cplx(cplx)>& f, cplx alpha0, double radius, int nodes) {
  if (nodes < 4 || !(radius > 0.0)) fail(ErrorCode::BadParams, "residue_at needs radius > 0 and nodes >= 4");
  auto circle = [&](int m) {
    cplx sum = 0.0;
    for (int j = 0; j < m; ++j) {
      const cplx e = std::polar(radius, 2.0 * kPi * j / m);
      sum += f(alpha0 + e) * e;
    }
    return sum / double(m);
  };
  const cplx a = circle(nodes);
  const cplx b = circle(2 * nodes);
  if (std::abs(a - b) > 1e-8) fail(ErrorCode::NonConvergent, "circle quadrature changed by " + std::to_string(std::abs(a - b)));
  return b;
}

ResidueReport spectral_action_residue(const SpacetimeModel& m, const ChartPoint& base,
                                      const std::vector<double>& eps_sequence, const ResidueOptions& opt) {
  const int n = m.n;
  if (n < 4 || n % 2) fail(ErrorCode::BadParams, "residue needs even n >= 4");
  if (opt.m < 1 || n / 2 - opt.m < 1) fail(ErrorCode::BadParams, "residue order m must satisfy 1 <= m <= n/2 - 1");
  if (opt.sign != 1 && opt.sign != -1) fail(ErrorCode::BadParams, "sign must be +1 or -1");
  if (eps_sequence.empty()) fail(ErrorCode::BadParams, "empty eps_sequence");
  for (double e : eps_sequence)
    if (!(e > 0.0)) fail(ErrorCode::BadParams, "eps_sequence entries must be positive");

  ResidueReport r;
  r.n = n;
  r.m = opt.m;
  r.sign = opt.sign;
  r.alpha0 = 0.5 * n - opt.m;
  r.eps_sequence = eps_sequence;
  r.u_diag = u_diag_series(m, base, opt.m, opt.transport);
  r.scalar_curvature = scalar_curvature(m, base);

  for (double eps : eps_sequence) {
    const cplx z = opt.mu + double(opt.sign) * kI * eps;
    auto f = [&](cplx a) { return hadamard_power_diag(r.u_diag, a, z, n, opt.m); };
    r.residues.push_back(residue_at(f, r.alpha0, opt.radius, opt.nodes));
  }
  if (eps_sequence.size() >= 2) {
    auto [v, err] = extrapolate_to_zero(eps_sequence, r.residues);
    r.extrapolated = v;
    r.extrapolation_error = err;
  } else {
    r.extrapolated = r.residues.front();
  }

  const double half = 0.5 * n;
  r.curvature_oracle = double(opt.sign) * kI * r.scalar_curvature /
                       (6.0 * std::pow(4.0 * kPi, half) * std::tgamma(half - 1.0));
  r.transport_oracle = double(opt.sign) * kI * r.u_diag[opt.m] /
                       (std::pow(2.0, n) * std::pow(kPi, half) * std::tgamma(half - opt.m));
  const double mag = std::abs(r.extrapolated), oc = std::abs(r.curvature_oracle), ot = std::abs(r.transport_oracle);
  r.rel_err = oc > 0.0 ? std::abs(mag - oc) / oc : mag;
  r.transport_rel_err = ot > 0.0 ? std::abs(r.extrapolated - r.transport_oracle) / ot : mag;
  auto sign_of = [&](cplx o) {
    if (std::abs(o) == 0.0 || mag == 0.0) return 0;
    return std::real(r.extrapolated / o) > 0.0 ? 1 : -1;
  };
  r.sign_vs_curvature = sign_of(r.curvature_oracle);
  r.sign_vs_transport = sign_of(r.transport_oracle);
  return r;
}

}  // namespace dslab
