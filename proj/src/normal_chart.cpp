#include "dslab/normal_chart.hpp"

#include <array>
#include <cmath>
#include <random>

#include "dslab/model_metric.hpp"
#include "dslab/ode.hpp"

namespace dslab {

namespace {

struct JacobiSnapshot {
  double tau;
  std::vector<double> x;
  Eigen::MatrixXd Y;
};

// Geodesic with initial velocity v0 plus Jacobi fields Y_j(0) = 0, Y_j'(0) = W0.col(j).
std::vector<JacobiSnapshot> integrate_jacobi(const SpacetimeModel& m, const std::vector<double>& x0,
                                             const Eigen::VectorXd& v0, const Eigen::MatrixXd& W0, double tau_end,
                                             const std::vector<double>& stops, double tol) {
  const int n = m.n;
  const int sz = 2 * n + 2 * n * n;
  ode::State y(sz, 0.0);
  for (int i = 0; i < n; ++i) {
    y[i] = x0[i];
    y[n + i] = v0(i);
  }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) y[2 * n + n * n + j * n + i] = W0(i, j);

  auto rhs = [&](double, const ode::State& s, ode::State& dy) {
    dispatch_dim(n, [&](auto NC) {
      constexpr int N = decltype(NC)::value;
      using S = Dual<double, N>;
      std::array<S, N> xs, vs, as;
      for (int i = 0; i < N; ++i) {
        xs[i] = S(s[i]);
        vs[i] = S(s[N + i]);
        for (int j = 0; j < N; ++j) {
          xs[i].d[j] = s[2 * N + j * N + i];
          vs[i].d[j] = s[2 * N + N * N + j * N + i];
        }
      }
      geodesic_accel<S, N>(m, xs.data(), vs.data(), as.data());
      for (int i = 0; i < N; ++i) {
        dy[i] = s[N + i];
        dy[N + i] = as[i].v;
        for (int j = 0; j < N; ++j) {
          dy[2 * N + j * N + i] = s[2 * N + N * N + j * N + i];
          dy[2 * N + N * N + j * N + i] = as[i].d[j];
        }
      }
      return 0;
    });
  };

  std::vector<JacobiSnapshot> out;
  auto snap = [&](double t, const ode::State& s) {
    JacobiSnapshot js{t, std::vector<double>(s.begin(), s.begin() + n), Eigen::MatrixXd(n, n)};
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) js.Y(i, j) = s[2 * n + j * n + i];
    out.push_back(std::move(js));
  };
  std::vector<double> stop_set = stops;
  stop_set.push_back(tau_end);
  size_t next = 0;
  auto hook = [&](double t, ode::State& s) {
    while (next < stop_set.size() && std::abs(t - stop_set[next]) <= 1e-14 * std::max(1.0, std::abs(t))) {
      snap(t, s);
      ++next;
    }
    return false;
  };
  ode::Options o;
  o.rtol = tol;
  o.atol = tol * 1e-2;
  o.h0 = std::min(1e-2, tau_end);
  ode::dopri5(rhs, 0.0, y, tau_end, o, hook, stop_set);
  return out;
}

Eigen::MatrixXd interior_g(const SpacetimeModel& m, const std::vector<double>& x) {
  return metric_eval(m, ChartPoint::interior(x));
}

}  // namespace

Eigen::MatrixXd minkowski_eta(int n) {
  Eigen::MatrixXd e = -Eigen::MatrixXd::Identity(n, n);
  e(0, 0) = 1.0;
  return e;
}

Eigen::MatrixXd default_frame(const SpacetimeModel& m, const ChartPoint& base) {
  const int n = m.n;
  Eigen::MatrixXd g = metric_eval(m, to_interior(base));
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(n, i);
    for (int k = 0; k < i; ++k) {
      double sk = k == 0 ? 1.0 : -1.0;
      v -= sk * (E.col(k).dot(g * v)) * E.col(k);
    }
    double q = v.dot(g * v);
    double want = i == 0 ? 1.0 : -1.0;
    if (!(q * want > 1e-14)) fail(ErrorCode::DegenerateMetric, "frame construction failed");
    E.col(i) = v / std::sqrt(q * want);
  }
  if (E(0, 0) < 0) E.col(0) = -E.col(0);
  return E;
}

std::vector<Eigen::VectorXd> ray_fan(int n, int rays, std::uint64_t seed) {
  std::vector<Eigen::VectorXd> dirs;
  for (int i = 0; i < n; ++i) {
    dirs.push_back(Eigen::VectorXd::Unit(n, i));
    dirs.push_back(-Eigen::VectorXd::Unit(n, i));
  }
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Eigen::VectorXd p = (Eigen::VectorXd::Unit(n, i) + Eigen::VectorXd::Unit(n, j)) * r;
      Eigen::VectorXd q = (Eigen::VectorXd::Unit(n, i) - Eigen::VectorXd::Unit(n, j)) * r;
      dirs.push_back(p);
      dirs.push_back(-p);
      dirs.push_back(q);
      dirs.push_back(-q);
    }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  while (int(dirs.size()) < rays) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = nd(rng);
    dirs.push_back(v.normalized());
  }
  return dirs;
}

NormalChart build_normal_chart(const SpacetimeModel& m, const ChartPoint& base, double radius, int rays, int samples,
                               const NormalChartOptions& opt) {
  m.validate();
  if (!(radius > 0.0) || samples < 4) fail(ErrorCode::BadParams, "radius must be positive and samples >= 4");
  NormalChart ch;
  ch.model = m;
  ch.base = to_interior(base);
  ch.radius = radius;
  ch.samples_per_ray = samples;
  ch.shoot_tol = opt.shoot_tol;
  ch.frame = opt.frame ? *opt.frame : default_frame(m, ch.base);
  const int n = m.n;
  const Eigen::MatrixXd eta = minkowski_eta(n);
  Eigen::MatrixXd g0 = interior_g(m, ch.base.coords);
  if ((ch.frame.transpose() * g0 * ch.frame - eta).cwiseAbs().maxCoeff() > 1e-10)
    fail(ErrorCode::BadParams, "frame is not orthonormal");
  ch.ray_directions = ray_fan(n, rays, opt.seed);
  ch.fan_size = 2 * n * n;

  std::vector<double> stops;
  for (int k = 1; k <= samples; ++k) stops.push_back(k * radius / samples);
  for (const auto& dir : ch.ray_directions) {
    Eigen::VectorXd v0 = ch.frame * dir;
    auto snaps = integrate_jacobi(m, ch.base.coords, v0, ch.frame, radius, stops, opt.shoot_tol);
    std::vector<RaySample> ray;
    ray.push_back({0.0, ch.base.coords, eta});
    for (int k = 1; k <= samples; ++k) {
      const auto& s = snaps.at(k - 1);
      Eigen::MatrixXd J = s.Y / s.tau;
      Eigen::MatrixXd gN = J.transpose() * interior_g(m, s.x) * J;
      if (std::abs(gN.determinant()) < 1e-10) fail(ErrorCode::NotInjective, "exponential map degenerates on the fan");
      ray.push_back({s.tau, s.x, gN});
    }
    ch.grid.push_back(std::move(ray));
  }
  // Distinct rays must end at distinct points.
  const double sep = 1e-6 * radius;
  for (size_t a = 0; a < ch.grid.size(); ++a)
    for (size_t b = a + 1; b < ch.grid.size(); ++b) {
      if ((ch.ray_directions[a] - ch.ray_directions[b]).norm() < 1e-12) continue;
      double d = 0.0;
      for (int i = 0; i < n; ++i) d = std::max(d, std::abs(ch.grid[a].back().point[i] - ch.grid[b].back().point[i]));
      if (d < sep) fail(ErrorCode::NotInjective, "two rays end at the same point");
    }
  if (opt.verify_inverse) {
    for (size_t r = 0; r < size_t(ch.fan_size); ++r) {
      Eigen::VectorXd X = inv_exp(ch, ch.grid[r].back().point);
      if ((X - radius * ch.ray_directions[r]).norm() > 1e-8 * std::max(1.0, radius))
        fail(ErrorCode::NotInjective, "shooting map inverse lands on a different ray");
    }
  }
  return ch;
}

ShootResult shoot(const NormalChart& ch, const Eigen::VectorXd& X) {
  const int n = ch.dim();
  auto snaps = integrate_jacobi(ch.model, ch.base.coords, ch.frame * X, ch.frame, 1.0, {}, ch.shoot_tol);
  ShootResult r;
  r.point = snaps.back().x;
  r.jacobian = snaps.back().Y;
  r.gN = r.jacobian.transpose() * interior_g(ch.model, r.point) * r.jacobian;
  (void)n;
  return r;
}

Eigen::VectorXd inv_exp(const NormalChart& ch, const std::vector<double>& q, double tol, int max_iter) {
  const int n = ch.dim();
  Eigen::VectorXd dq(n);
  for (int i = 0; i < n; ++i) dq(i) = q.at(i) - ch.base.coords[i];
  Eigen::VectorXd X = ch.frame.lu().solve(dq);
  for (int it = 0; it < max_iter; ++it) {
    ShootResult s = shoot(ch, X);
    Eigen::VectorXd res(n);
    for (int i = 0; i < n; ++i) res(i) = s.point[i] - q[i];
    Eigen::VectorXd dX = s.jacobian.lu().solve(res);
    if (!dX.allFinite()) break;
    X -= dX;
    if (dX.norm() <= tol * std::max(1.0, X.norm())) return X;
  }
  fail(ErrorCode::NewtonDivergence, "shooting map inversion did not converge");
}

}  // namespace dslab
