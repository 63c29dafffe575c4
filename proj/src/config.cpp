#include "dslab/config.hpp"

#include <cmath>

#include "dslab/error.hpp"
#include "dslab/flow.hpp"

namespace dslab {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::ConfigError, what);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void RunConfig::validate() const {
  try {
    parse_model(model);
    parse_variant(variant);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    fail(ErrorCode::ConfigError, e.what());
  }
  require(n >= 2 && n <= 8 && n % 2 == 0, "n must be even with 2 <= n <= 8");
  require(finite(delta), "delta must be finite");
  require(finite(bump_center) && bump_width > 0.0, "bump_width must be positive");
  require(fd_step > 0.0 && fd_step < 0.1, "fd_step must lie in (0, 0.1)");
  require(base.empty() || static_cast<int>(base.size()) == n, "base needs n coordinates (h, u_1..u_{n-1})");
  for (double v : base) require(finite(v), "base coordinates must be finite");

  require(ensemble >= 1, "ensemble must be >= 1");
  require(t_max > 0.0, "t_max must be positive");
  require(flow_tol > 0.0 && flow_tol < 1e-2, "flow_tol must lie in (0, 1e-2)");
  require(finite(omega_r) && finite(lambda_re) && finite(lambda_im), "flow parameters must be finite");

  require(order >= 0 && order <= 2, "order must lie in 0..2");
  require(rays >= 0, "rays must be >= 0");
  require(samples >= 4, "samples must be >= 4");
  require(radius > 0.0 && radius < 1.0, "radius must lie in (0, 1)");
  require(!eps.empty(), "eps needs at least one value");
  for (size_t i = 0; i < eps.size(); ++i) {
    require(eps[i] > 0.0, "eps values must be positive");
    if (i) require(eps[i] < eps[i - 1], "eps values must decrease");
  }
  require(sign == 1 || sign == -1, "sign must be 1 or -1");
  require(finite(mu), "mu must be finite");
  if (subcommand == "residue") {
    require(n >= 4, "residue needs n >= 4");
    require(m >= 1 && m <= n / 2 - 1 && m <= 2, "m must satisfy 1 <= m <= min(2, n/2 - 1)");
  }

  require(epsilon > 0.0 && eta > 0.0, "epsilon and eta must be positive");
  require(C > c && c > 0.0, "contour needs C > c > 0");
  require(quad_tol > 0.0 && quad_tol < 1e-2, "quad_tol must lie in (0, 1e-2)");
  require(!alpha.empty() && !q.empty(), "alpha and q grids must be non-empty");
  for (double a : alpha) require(a >= 1.0, "alpha values must be >= 1");
  for (double v : q) require(v < x_right - 1.0, "q values must lie left of x_right - 1");

  require(n_samples >= 1, "n_samples must be >= 1");
  require(residual_tol > 0.0, "residual_tol must be positive");
}

SpacetimeModel RunConfig::spacetime_model() const {
  SpacetimeModel sm;
  sm.kind = parse_model(model);
  sm.n = n;
  sm.pert.amplitude = sm.kind == ModelKind::PerturbedDS ? delta : 0.0;
  sm.pert.center = bump_center;
  sm.pert.width = bump_width;
  sm.fd_step = fd_step;
  return sm;
}

ChartPoint RunConfig::base_point() const {
  if (!base.empty()) return ChartPoint::interior(base);
  std::vector<double> c(n, 0.0);
  c[0] = 0.3;
  if (n > 1) c[1] = 0.1;
  if (n > 2) c[2] = -0.2;
  return ChartPoint::interior(c);
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["subcommand"] = subcommand;
  j["model"] = model;
  j["n"] = n;
  j["delta"] = delta;
  j["bump_center"] = bump_center;
  j["bump_width"] = bump_width;
  j["fd_step"] = fd_step;
  j["seed"] = seed;
  j["base"] = base_point().coords;
  j["emit_gnuplot"] = emit_gnuplot;
  if (subcommand == "flow") {
    j["variant"] = variant;
    j["omega_r"] = omega_r;
    j["lambda_re"] = lambda_re;
    j["lambda_im"] = lambda_im;
    j["ensemble"] = ensemble;
    j["t_max"] = t_max;
    j["flow_tol"] = flow_tol;
  } else if (subcommand == "transport" || subcommand == "residue") {
    j["rays"] = rays;
    j["samples"] = samples;
    j["radius"] = radius;
    if (subcommand == "transport") {
      j["order"] = order;
      j["grid_csv"] = grid_csv;
    } else {
      j["eps"] = eps;
      j["sign"] = sign;
      j["m"] = m;
      j["mu"] = mu;
    }
  } else if (subcommand == "contour") {
    j["epsilon"] = epsilon;
    j["eta"] = eta;
    j["C"] = C;
    j["c"] = c;
    j["quad_tol"] = quad_tol;
    j["x_right"] = x_right;
    j["alpha"] = alpha;
    j["q"] = q;
    j["mu"] = mu;
  } else {
    j["n_samples"] = n_samples;
    j["residual_tol"] = residual_tol;
  }
  return j;
}

}  // namespace dslab
