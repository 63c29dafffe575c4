#include "dslab/hadamard.hpp"

#include <algorithm>
#include <cmath>

#include "dslab/error.hpp"

namespace dslab {

namespace {

double u0_of(const Eigen::MatrixXd& gN) { return std::pow(std::abs(gN.determinant()), -0.25); }

Eigen::MatrixXd orthonormal_frame(const Eigen::MatrixXd& g) {
  const int n = int(g.rows());
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(n, i);
    for (int k = 0; k < i; ++k) v -= (k == 0 ? 1.0 : -1.0) * E.col(k).dot(g * v) * E.col(k);
    double q = v.dot(g * v) * (i == 0 ? 1.0 : -1.0);
    if (!(q > 1e-14)) fail(ErrorCode::DegenerateMetric, "normal-coordinate metric lost its signature");
    E.col(i) = v / std::sqrt(q);
  }
  return E;
}

// -Gamma^j (contracted Christoffel) term of the box operator: box f = g^{ij} d_ij f - Gamma^j d_j f.
Eigen::VectorXd contracted_gamma(const Eigen::MatrixXd& g, const std::vector<Eigen::MatrixXd>& dg) {
  const int n = int(g.rows());
  Eigen::MatrixXd gi = g.inverse();
  Eigen::VectorXd w(n);
  for (int c = 0; c < n; ++c) {
    double a = 0.0, b = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        a += gi(i, j) * dg[i](c, j);
        b += gi(i, j) * dg[c](i, j);
      }
    w(c) = a - 0.5 * b;
  }
  return gi * w;
}

struct Fan {
  int n;
  int axis_plus(int i) const { return 2 * i; }
  int axis_minus(int i) const { return 2 * i + 1; }
  int pair_base(int i, int j) const {
    int idx = 0;
    for (int a = 0; a < i; ++a) idx += n - 1 - a;
    idx += j - i - 1;
    return 2 * n + 4 * idx;
  }
};

// f at offset k * stride along the line through rays (plus, minus).
template <class V>
double line_value(const V& vals, double origin, int plus, int minus, int k) {
  if (k == 0) return origin;
  return k > 0 ? vals[plus][k] : vals[minus][-k];
}

template <class V>
double line_d2(const V& vals, double o, int p, int q, int st, double s) {
  double f2m = line_value(vals, o, p, q, -2 * st), f1m = line_value(vals, o, p, q, -st);
  double f1p = line_value(vals, o, p, q, st), f2p = line_value(vals, o, p, q, 2 * st);
  double h = st * s;
  return (-f2m + 16 * f1m - 30 * o + 16 * f1p - f2p) / (12 * h * h);
}

template <class V>
double line_d1(const V& vals, double o, int p, int q, int st, double s) {
  double f2m = line_value(vals, o, p, q, -2 * st), f1m = line_value(vals, o, p, q, -st);
  double f1p = line_value(vals, o, p, q, st), f2p = line_value(vals, o, p, q, 2 * st);
  double h = st * s;
  return (f2m - 8 * f1m + 8 * f1p - f2p) / (12 * h);
}

// Box of a grid function at the origin using the fan lines with stride st.
double box_at_origin(const NormalChart& ch, const std::vector<std::vector<double>>& vals, int st) {
  const int n = ch.dim();
  const double s = ch.step();
  Fan fan{n};
  const double o = vals[0][0];
  Eigen::MatrixXd H(n, n);
  Eigen::VectorXd grad(n);
  for (int i = 0; i < n; ++i) {
    H(i, i) = line_d2(vals, o, fan.axis_plus(i), fan.axis_minus(i), st, s);
    grad(i) = line_d1(vals, o, fan.axis_plus(i), fan.axis_minus(i), st, s);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      int b = fan.pair_base(i, j);
      double dp = line_d2(vals, o, b, b + 1, st, s);
      double dm = line_d2(vals, o, b + 2, b + 3, st, s);
      H(i, j) = H(j, i) = 0.5 * (dp - dm);
    }
  // derivatives of g_N at the origin along the axes
  std::vector<Eigen::MatrixXd> dg(n, Eigen::MatrixXd::Zero(n, n));
  for (int k = 0; k < n; ++k) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        std::vector<std::vector<double>> comp(ch.grid.size());
        for (int r : {fan.axis_plus(k), fan.axis_minus(k)}) {
          comp[r].resize(ch.grid[r].size());
          for (size_t m = 0; m < ch.grid[r].size(); ++m) comp[r][m] = ch.grid[r][m].gN(a, b);
        }
        dg[k](a, b) = line_d1(comp, ch.grid[0][0].gN(a, b), fan.axis_plus(k), fan.axis_minus(k), st, s);
      }
  }
  const Eigen::MatrixXd& g = ch.grid[0][0].gN;
  Eigen::MatrixXd gi = g.inverse();
  double trace = (gi.cwiseProduct(H)).sum();
  return trace - contracted_gamma(g, dg).dot(grad);
}

// Integral over [t_{m-1}, t_m] of the cubic through four neighbouring samples.
double cubic_panel(const std::vector<double>& f, int m, double s) {
  const int M = int(f.size()) - 1;
  if (M < 3) fail(ErrorCode::BadParams, "need at least four samples per ray");
  if (m == 1) return s * (9 * f[0] + 19 * f[1] - 5 * f[2] + f[3]) / 24.0;
  if (m == M) return s * (f[M - 3] - 5 * f[M - 2] + 19 * f[M - 1] + 9 * f[M]) / 24.0;
  return s * (-f[m - 2] + 13 * f[m - 1] + 13 * f[m] - f[m + 1]) / 24.0;
}

}  // namespace

double box_u0_at(const NormalChart& ch, const Eigen::VectorXd& X, double step) {
  const int n = ch.dim();
  ShootResult c = shoot(ch, X);
  const Eigen::MatrixXd& g = c.gN;
  Eigen::MatrixXd F = orthonormal_frame(g);
  const double u = u0_of(g);
  double trace = 0.0;
  Eigen::VectorXd du(n);
  std::vector<Eigen::MatrixXd> Dg(n);
  for (int a = 0; a < n; ++a) {
    ShootResult p1 = shoot(ch, X + step * F.col(a)), p2 = shoot(ch, X + 2 * step * F.col(a));
    ShootResult q1 = shoot(ch, X - step * F.col(a)), q2 = shoot(ch, X - 2 * step * F.col(a));
    double up1 = u0_of(p1.gN), up2 = u0_of(p2.gN), uq1 = u0_of(q1.gN), uq2 = u0_of(q2.gN);
    trace += (a == 0 ? 1.0 : -1.0) * (-up2 + 16 * up1 - 30 * u + 16 * uq1 - uq2) / (12 * step * step);
    du(a) = (uq2 - 8 * uq1 + 8 * up1 - up2) / (12 * step);
    Dg[a] = (q2.gN - 8 * q1.gN + 8 * p1.gN - p2.gN) / (12 * step);
  }
  // coordinate derivatives from frame-directional ones: d_k = sum_a (F^{-1})_{ak} D_a
  Eigen::MatrixXd Finv = F.inverse();
  std::vector<Eigen::MatrixXd> dg(n, Eigen::MatrixXd::Zero(n, n));
  Eigen::VectorXd grad = Finv.transpose() * du;
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < n; ++a) dg[k] += Finv(a, k) * Dg[a];
  return trace - contracted_gamma(g, dg).dot(grad);
}

TransportSolution solve_transport(const SpacetimeModel& m, const ChartPoint& base, int N,
                                  const TransportParams& params) {
  if (N < 0 || N > 2) fail(ErrorCode::BadParams, "transport orders 0..2 are supported");
  const int n = m.n;
  NormalChartOptions nopt;
  nopt.frame = params.frame;
  nopt.seed = params.seed;
  const int rays = std::max(params.rays, 2 * n * n);
  TransportSolution sol;
  sol.chart = build_normal_chart(m, base, params.radius, rays, params.samples, nopt);
  sol.N = N;
  const NormalChart& ch = sol.chart;
  const int R = int(ch.grid.size());
  const int M = ch.samples_per_ray;
  const double s = ch.step();

  std::vector<std::vector<double>> u0(R, std::vector<double>(M + 1));
  for (int r = 0; r < R; ++r)
    for (int k = 0; k <= M; ++k) u0[r][k] = u0_of(ch.grid[r][k].gN);
  sol.u.push_back(u0);

  sol.b_field.assign(R, std::vector<double>(M + 1, 0.0));
  for (int r = 0; r < R; ++r)
    for (int k = 1; k <= M; ++k) {
      auto L = [&](int j) { return std::log(u0[r][j]); };
      double d = k < M ? (L(k + 1) - L(k - 1)) / (2 * s) : (3 * L(k) - 4 * L(k - 1) + L(k - 2)) / (2 * s);
      sol.b_field[r][k] = -2.0 * ch.grid[r][k].t * d;
    }

  sol.u_diag.push_back(1.0);
  sol.convergence.u_diag_coarse.push_back(1.0);
  auto gate = [&](double fine, double coarse) {
    double drift = std::abs(fine - coarse) / std::max({std::abs(fine), std::abs(coarse), 1e-3});
    sol.convergence.max_relative_drift = std::max(sol.convergence.max_relative_drift, drift);
    if (drift > params.drift_tol) fail(ErrorCode::GridTooCoarse, "two-resolution check failed for the transport operator");
  };
  if (N >= 1) {
    double S0 = box_at_origin(ch, u0, 1);
    double S0c = box_at_origin(ch, u0, 2);
    gate(S0, S0c);
    sol.u_diag.push_back(-S0);
    sol.convergence.u_diag_coarse.push_back(-S0c);

    // u1 along the rays from the integrating-factor quadrature.
    const bool need = N >= 2 || params.full_grid;
    if (need) {
      const int Mk = params.full_grid ? M : std::min(M, 4);
      const int Rk = params.full_grid ? R : ch.fan_size;
      const double sprime = s;
      std::vector<std::vector<double>> u1(R);
      for (int r = 0; r < Rk; ++r) {
        std::vector<double> phi(Mk + 1);
        phi[0] = S0;  // mu(0) = 1
        for (int k = 1; k <= Mk; ++k) {
          Eigen::VectorXd X = ch.grid[r][k].t * ch.ray_directions[r];
          phi[k] = box_u0_at(ch, X, sprime) / u0[r][k];
        }
        u1[r].assign(Mk + 1, 0.0);
        u1[r][0] = -S0;
        double acc = 0.0;
        for (int k = 1; k <= Mk; ++k) {
          acc += cubic_panel(phi, k, s);
          u1[r][k] = -u0[r][k] * acc / ch.grid[r][k].t;
        }
      }
      sol.u.push_back(u1);
      if (N >= 2) {
        double S1 = box_at_origin(ch, u1, 1);
        double S1c = box_at_origin(ch, u1, 2);
        gate(S1, S1c);
        sol.u_diag.push_back(-S1 / 2.0);
        sol.convergence.u_diag_coarse.push_back(-S1c / 2.0);
      }
    } else {
      sol.u.push_back(std::vector<std::vector<double>>(R, std::vector<double>{-S0}));
    }
  }
  if (N >= 2) sol.u.push_back(std::vector<std::vector<double>>(R, std::vector<double>{sol.u_diag[2]}));
  return sol;
}

std::vector<double> u_diag_series(const SpacetimeModel& m, const ChartPoint& base, int N,
                                  const TransportParams& params) {
  return solve_transport(m, base, N, params).u_diag;
}

}  // namespace dslab
