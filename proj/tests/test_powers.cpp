#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "dslab/powers.hpp"

using namespace dslab;

namespace {

const cplx kI(0.0, 1.0);

SpacetimeModel model(ModelKind k, int n = 4) {
  SpacetimeModel m;
  m.kind = k;
  m.n = n;
  return m;
}

ChartPoint base_point(int n) {
  std::vector<double> c(n, 0.0);
  c[0] = 0.3;
  c[1] = 0.1;
  c[2] = -0.2;
  return ChartPoint::interior(c);
}

ResidueOptions fast_residue(int m = 1, int sign = 1) {
  ResidueOptions o;
  o.m = m;
  o.sign = sign;
  o.transport.full_grid = false;
  return o;
}

const std::vector<double> kEps{0.1, 0.05, 0.025, 0.0125};

}  // namespace

TEST_CASE("contour geometry") {
  const auto s = build_contour(0.1);
  CHECK(s.z.size() == s.dz.size());
  CHECK(s.z.size() == s.piece.size());
  CHECK(std::abs(s.branch(-5.0) - (-std::pow(-5.0 + std::sqrt(0.1) * std::exp(kI * kPi / 4.0) + 2.0 * kI, 2) - 2.25)) <
        1e-13);
  CHECK(std::abs(s.branch(5.0) - (-std::pow(5.0 + std::sqrt(0.1) * std::exp(kI * kPi / 4.0) + 1.0 * kI, 2) - 2.25)) <
        1e-13);
  const double t = 6.0, h = 1e-5;
  CHECK(std::abs(s.branch_derivative(t) - (s.branch(t + h) - s.branch(t - h)) / (2 * h)) < 1e-6);
  CHECK(s.cap_min_abs_imag() > 0.0);
  CHECK(s.cap_min_distance_to_pole() > 0.0);
  const double r = s.tail_envelope_ratio();
  CHECK(r > 0.5);
  CHECK(r < 2.0);
  CHECK(build_contour(0.1, 4, 2, 1, 1e-12).z.size() > build_contour(0.1, 4, 2, 1, 1e-6).z.size());
}

TEST_CASE("contour parameters are validated") {
  CHECK_THROWS_AS(build_contour(0.1, 4, 1, 1), Error);
  CHECK_THROWS_AS(build_contour(0.1, 4, 1, 2), Error);
  CHECK_THROWS_AS(build_contour(0.0), Error);
  CHECK_THROWS_AS(build_contour(0.1, 0.0), Error);
  try {
    build_contour(0.1, 4, 1, 2);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadParams);
  }
}

TEST_CASE("closed truncated loop integrates holomorphic functions to zero") {
  const auto s = build_contour(0.1);
  CHECK(std::abs(closed_loop_integral(s, [](cplx z) { return std::exp(z / 10.0); })) < 1e-10);
  CHECK(std::abs(closed_loop_integral(s, [](cplx z) { return 1.0 / ((z - 25.0) * (z - 25.0)); })) < 1e-10);
}

TEST_CASE("scalar power through the contour") {
  CHECK(std::abs(scalar_power_via_contour(1.0, 2.0, build_contour(1.0)) - 0.5 * kI) < 1e-6);
  const auto s = build_contour(0.1);
  CHECK(std::abs(scalar_power_via_contour(5.0, 1.5, s) - std::pow(cplx(5.0, -0.1), -1.5)) < 1e-6);
  for (double eps : {1.0, 0.1, 0.01}) {
    const auto se = build_contour(eps);
    double worst = 0.0;
    for (double a : {1.0, 1.5, 2.0, 3.0})
      for (double q : {0.5, 1.0, 2.0, 10.0})
        worst = std::max(worst, std::abs(scalar_power_via_contour(q, a, se) - std::pow(cplx(q, -eps), -a)));
    CHECK(worst < 1e-6);
  }
  const cplx ac(1.3, 0.4);
  CHECK(std::abs(scalar_power_via_contour(2.0, ac, s) - std::exp(-ac * std::log(cplx(2.0, -0.1)))) < 1e-6);
}

TEST_CASE("contour deformation does not change the scalar power") {
  const auto a = build_contour(0.1);
  const auto b = build_contour(0.1, 6.0, 3.0, 0.5, 1e-10, 4, 30.0);
  for (double q : {0.5, 5.0})
    CHECK(std::abs(scalar_power_via_contour(q, 1.5, a) - scalar_power_via_contour(q, 1.5, b)) < 1e-8);
}

TEST_CASE("scalar power error paths") {
  const auto s = build_contour(0.1);
  CHECK_THROWS_AS(scalar_power_via_contour(19.999, 2.0, s), Error);
  try {
    scalar_power_via_contour(19.999, 2.0, s);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PoleTooClose);
  }
  CHECK_THROWS_AS(scalar_power_via_contour(25.0, 2.0, s), Error);
  CHECK_THROWS_AS(scalar_power_via_contour(1.0, 0.5, s), Error);
}

TEST_CASE("branch of the complex power") {
  CHECK(std::abs(power_upper_cut(cplx(4.0, 0.0), 0.5) - 0.5) < 1e-15);
  const cplx w(-1.0, -1e-12);
  CHECK(std::abs(power_upper_cut(w, 1.0) + 1.0) < 1e-10);
  const cplx a = power_upper_cut(cplx(-1.0, 1e-9), 0.5), b = power_upper_cut(cplx(-1.0, -1e-9), 0.5);
  CHECK(std::abs(a - b) < 1e-8);
  const cplx l = power_upper_cut(cplx(-1e-9, 1.0), 0.5), r = power_upper_cut(cplx(1e-9, 1.0), 0.5);
  CHECK(std::abs(l - r) > 0.5);
}

TEST_CASE("Gamma-ratio coefficient") {
  for (cplx a : {cplx(1.0, 0.0), cplx(2.5, 0.0), cplx(1.2, 0.7)})
    CHECK(std::abs(fk_contour_coefficient(a, 0) - complex_rgamma(a)) < 1e-14);
  CHECK(std::abs(fk_contour_coefficient(2.0, 1) - 1.0) < 1e-14);
  for (cplx a : {cplx(1.5, 0.0), cplx(2.3, 0.0), cplx(3.0, 0.0)})
    for (int k : {0, 1, 2})
      for (double eps : {0.1, 0.05}) {
        const auto s = build_contour(eps);
        const cplx lhs = scalar_power_via_contour(3.0, a, s, k);
        const cplx rhs = fk_contour_coefficient(a, k) * complex_gamma(a + double(k)) * std::pow(cplx(3.0, -eps), -a - double(k));
        CHECK(std::abs(lhs - rhs) < 1e-6);
      }
}

TEST_CASE("flat diagonal values") {
  const cplx o = flat_diag_F_oracle_n2(3.0, kI);
  CHECK(std::abs(o - flat_diag_F(3.0, kI, 2)) < 1e-4);
  const cplx o2 = flat_diag_F_oracle_n2(cplx(1.7, 0.3), cplx(0.5, -1.0));
  CHECK(std::abs(o2 - flat_diag_F(cplx(1.7, 0.3), cplx(0.5, -1.0), 2)) < 1e-4);
  CHECK(std::isfinite(std::abs(flat_diag_F(12.0, kI, 4))));

  for (cplx z : {cplx(0.3, 1.0), cplx(-2.0, 0.5)})
    for (cplx beta : {cplx(2.5, 0.0), cplx(3.2, 0.4)}) {
      const double lam = 1.7;
      const cplx ratio = flat_diag_F(beta, lam * lam * z, 4) / flat_diag_F(beta, z, 4);
      CHECK(std::abs(ratio - std::pow(lam, 4.0 - 2.0 * beta - 2.0)) < 1e-12);
    }

  for (int n : {4, 6})
    for (int a = -2; a <= n / 2 + 2; ++a) {
      const bool pole = flat_diag_F_checked(double(a) - 1.0, kI, n).pole;
      CHECK(pole == (a <= n / 2));
    }
  CHECK(!flat_diag_F_checked(0.5, kI, 4).pole);
  CHECK_THROWS_AS(flat_diag_F(1.0, kI, 4), Error);
}

TEST_CASE("assembled poles follow the progression n/2, ..., 1") {
  const std::vector<double> u{1.0, 2.0};
  const cplx z(0.0, 0.1);
  for (int n : {4, 6}) {
    auto f = [&](cplx a) { return hadamard_power_diag(u, a, z, n, 1); };
    for (int a = 1; a <= n / 2; ++a) CHECK(std::abs(residue_at(f, double(a))) > 1e-8);
    for (int a : {0, -1}) CHECK(std::abs(residue_at(f, double(a))) < 1e-10);
    CHECK(std::abs(residue_at(f, 1.5)) < 1e-10);
    for (int a = 1; a <= n / 2; ++a) {
      auto g = [&](cplx al) { return (al - double(a)) * f(al); };
      CHECK(std::abs(residue_at(g, double(a))) < 1e-10);
    }
  }
  const std::vector<double> flat{1.0, 0.0};
  const cplx a(3.5, 0.2);
  CHECK(std::abs(hadamard_power_diag(flat, a, z, 4, 1) - complex_rgamma(a) * flat_diag_F(a - 1.0, z, 4)) < 1e-15);
}

TEST_CASE("residue extraction") {
  CHECK(std::abs(residue_at([](cplx a) { return 1.0 / (a - 2.0); }, 2.0) - 1.0) < 1e-10);
  CHECK(std::abs(residue_at([](cplx a) { return std::exp(a); }, 0.7)) < 1e-10);
  CHECK_THROWS_AS(residue_at([](cplx a) { return 1.0 / (a - 2.2); }, 2.0, 0.25, 4), Error);
}

TEST_CASE("spectral action residue in the flat model") {
  const auto r = spectral_action_residue(model(ModelKind::Flat), base_point(4), kEps, fast_residue());
  CHECK(std::abs(r.extrapolated) < 1e-8);
  for (size_t i = 0; i < kEps.size(); ++i) {
    // the finite-eps residue is linear in eps and vanishes only in the limit
    CHECK(std::abs(r.residues[i] / kEps[i] - r.residues[0] / kEps[0]) < 1e-10);
  }
  CHECK(r.scalar_curvature == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("spectral action residue on exact de Sitter") {
  for (int sign : {1, -1}) {
    const auto r = spectral_action_residue(model(ModelKind::ExactDS), base_point(4), kEps, fast_residue(1, sign));
    CHECK(r.alpha0 == 1.0);
    CHECK(std::abs(r.extrapolated.real()) < 1e-6 * std::abs(r.extrapolated));
    CHECK(std::abs(r.extrapolated) == doctest::Approx(12.0 / (96.0 * kPi * kPi)).epsilon(1e-3));
    CHECK(r.rel_err < 1e-3);
    CHECK(r.transport_rel_err < 1e-6);
    CHECK(r.extrapolation_error < 1e-4 * std::abs(r.extrapolated));
    CHECK(r.sign_vs_transport == 1);
    CHECK(r.sign_vs_curvature == -1);
    CHECK(r.extrapolated.imag() * sign > 0.0);
  }
}

TEST_CASE("second residue in six dimensions") {
  const auto r = spectral_action_residue(model(ModelKind::ExactDS, 6), base_point(6), kEps, fast_residue(2));
  CHECK(r.alpha0 == 1.0);
  REQUIRE(r.u_diag.size() >= 3);
  CHECK(r.transport_rel_err < 1e-6);
  CHECK(std::abs(r.extrapolated - r.transport_oracle) < 1e-6 * std::abs(r.transport_oracle));
}
