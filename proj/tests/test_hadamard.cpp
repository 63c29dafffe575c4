#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "dslab/hadamard.hpp"

using namespace dslab;

namespace {

SpacetimeModel model(ModelKind k, double delta = 0.0, int n = 4) {
  SpacetimeModel m;
  m.kind = k;
  m.n = n;
  m.pert.amplitude = delta;
  return m;
}

TransportParams fast() {
  TransportParams p;
  p.full_grid = false;
  return p;
}

double u1(const SpacetimeModel& m, const std::vector<double>& x, TransportParams p = fast()) {
  return u_diag_series(m, ChartPoint::interior(x), 1, p)[1];
}

}  // namespace

TEST_CASE("flat model") {
  const auto m = model(ModelKind::Flat);
  const auto sol = solve_transport(m, ChartPoint::interior({0.1, 0.2, 0.3, 0.4}), 2);
  for (const auto& ray : sol.u[0])
    for (double v : ray) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
  // rounding noise grows by one second difference per order
  for (int k = 1; k <= 2; ++k)
    for (const auto& ray : sol.u[k])
      for (double v : ray) CHECK(std::abs(v) < (k == 1 ? 1e-8 : 1e-5));
  const auto d = u_diag_series(m, ChartPoint::interior({0.0, 0.0, 0.0, 0.0}), 2, fast());
  REQUIRE(d.size() == 3);
  CHECK(d[0] == 1.0);
  CHECK(std::abs(d[1]) < 1e-8);
  CHECK(std::abs(d[2]) < 1e-5);
}

TEST_CASE("u0 starts at one and is smooth across the fan") {
  const auto sol = solve_transport(model(ModelKind::ExactDS), ChartPoint::interior({0.3, 0.1, -0.2, 0.0}), 1);
  for (const auto& ray : sol.u[0]) CHECK(ray.front() == 1.0);
  double spread = 0.0;
  for (const auto& ray : sol.u[0]) spread = std::max(spread, std::abs(ray.back() - 1.0));
  CHECK(spread < 0.05);
}

TEST_CASE("first transport coefficient matches the curvature") {
  const auto m = model(ModelKind::ExactDS);
  for (const auto& x : std::vector<std::vector<double>>{{0.3, 0.1, -0.2, 0.0}, {-0.6, 0.4, 0.2, -0.3}, {1.1, 0.0, 0.5, 0.1}}) {
    const double R = scalar_curvature(m, ChartPoint::interior(x));
    CHECK(u1(m, x) == doctest::Approx(-R / 6.0).epsilon(1e-3));
  }
}

TEST_CASE("perturbed model inside the bump") {
  const auto m = model(ModelKind::PerturbedDS, 0.05);
  for (const auto& x : std::vector<std::vector<double>>{{1.4, 0.2, -0.1, 0.4}, {1.6, -0.3, 0.2, 0.1}}) {
    const double R = scalar_curvature(m, ChartPoint::interior(x));
    CHECK(std::abs(R + 12.0) > 1e-3);
    CHECK(u1(m, x) == doctest::Approx(-R / 6.0).epsilon(1e-3));
  }
}

TEST_CASE("perturbed model away from the bump equals exact de Sitter") {
  const std::vector<double> x{0.3, 0.1, -0.2, 0.0};
  const auto a = u_diag_series(model(ModelKind::ExactDS), ChartPoint::interior(x), 1, fast());
  const auto b = u_diag_series(model(ModelKind::PerturbedDS, 0.05), ChartPoint::interior(x), 1, fast());
  CHECK(std::abs(a[1] - b[1]) < 1e-6);
}

TEST_CASE("grid refinement") {
  const auto m = model(ModelKind::PerturbedDS, 0.05);
  const std::vector<double> x{1.4, 0.2, -0.1, 0.4};
  auto p = fast();
  const double coarse = u1(m, x, p);
  p.samples *= 2;
  p.rays = 64;
  const double fine = u1(m, x, p);
  CHECK(std::abs(fine - coarse) < 1e-3 * std::abs(fine));
}

TEST_CASE("independence of the orthonormal frame") {
  const auto m = model(ModelKind::PerturbedDS, 0.05);
  const auto base = ChartPoint::interior({1.4, 0.2, -0.1, 0.4});
  auto p = fast();
  const double a = u_diag_series(m, base, 1, p)[1];
  Eigen::MatrixXd L = Eigen::MatrixXd::Identity(4, 4);
  const double th = 0.7, ch = std::cosh(0.3), sh = std::sinh(0.3);
  Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(4, 4);
  rot(1, 1) = rot(2, 2) = std::cos(th);
  rot(1, 2) = -std::sin(th);
  rot(2, 1) = std::sin(th);
  L(0, 0) = L(3, 3) = ch;
  L(0, 3) = L(3, 0) = sh;
  p.frame = default_frame(m, base) * rot * L;
  const auto g = metric_eval(m, base);
  REQUIRE((p.frame->transpose() * g * *p.frame - minkowski_eta(4)).norm() < 1e-10);
  const double b = u_diag_series(m, base, 1, p)[1];
  CHECK(std::abs(a - b) < 1e-6);
}

TEST_CASE("u1 depends smoothly on the base point") {
  const auto m = model(ModelKind::PerturbedDS, 0.05);
  std::vector<double> vals;
  for (int i = 0; i < 5; ++i) vals.push_back(u1(m, {1.30 + 0.02 * i, 0.2, -0.1, 0.4}));
  for (int i = 0; i + 1 < 5; ++i) CHECK(std::abs(vals[i + 1] - vals[i]) / 0.02 < 50.0);
  for (int i = 1; i + 1 < 5; ++i) CHECK(std::abs(vals[i + 1] - 2 * vals[i] + vals[i - 1]) / (0.02 * 0.02) < 2000.0);
}

TEST_CASE("second coefficient in six dimensions") {
  const auto m = model(ModelKind::ExactDS, 0.0, 6);
  std::vector<double> x(6, 0.1);
  x[0] = 0.3;
  const auto d = u_diag_series(m, ChartPoint::interior(x), 2, fast());
  CHECK(d[1] == doctest::Approx(5.0).epsilon(1e-3));
  CHECK(d[2] == doctest::Approx(12.0).epsilon(1e-2));
}
