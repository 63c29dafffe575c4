#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "dslab/operator.hpp"

using namespace dslab;

namespace {

SpacetimeModel model(ModelKind k, double delta = 0.0, int n = 4) {
  SpacetimeModel m;
  m.kind = k;
  m.n = n;
  m.pert.amplitude = delta;
  return m;
}

const SpacetimeModel kExact = model(ModelKind::ExactDS);
const SpacetimeModel kPert = model(ModelKind::PerturbedDS, 0.05);

}  // namespace

TEST_CASE("spectral parameter round trip") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-5.0, 5.0);
  for (int n : {2, 4, 6}) {
    for (int s = 0; s < 50; ++s) {
      const cplx z(U(rng), U(rng));
      const cplx lam = lambda_of_z(z, n);
      CHECK(lam.imag() >= 0.0);
      CHECK(std::abs(z_of_lambda(lam, n) - z) < 1e-12 * (1.0 + std::abs(z)));
    }
  }
  CHECK(std::abs(lambda_of_z(cplx(-2.25, 0.0), 4)) < 1e-15);
  const auto sp = SpectralParams::from_z(cplx(-2.25 - 4.0, 0.0), 4);
  CHECK(sp.lambda.real() == doctest::Approx(2.0));
  CHECK(sp.threshold() == doctest::Approx(0.5));
}

TEST_CASE("volume coefficient at the boundary") {
  const auto xp = stereo_to_sphere({0.3, -0.1, 0.2});
  CHECK(gamma_coeff(kExact, 0.0, xp, End::Future) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(gamma_coeff(kExact, 0.5, xp, End::Future) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(gamma_coeff(model(ModelKind::ExactDS, 0.0, 6), 0.0, stereo_to_sphere({0.1, 0.1, 0.1, 0.1, 0.1}),
                    End::Future) == doctest::Approx(5.0).epsilon(1e-9));
  const auto c = collar_coeffs(kExact, 0.0, xp, End::Future, cplx(0.0, 0.0));
  CHECK(c.a2 == 0.0);
  CHECK(std::abs(c.a1 - 4.0) < 1e-12);
  CHECK(std::abs(c.a0 - 9.0) < 1e-8);
}

TEST_CASE("principal symbol in the collar") {
  const std::vector<double> north{0.0, 0.0, 0.0, 1.0};
  const std::vector<double> zero(4, 0.0);
  CHECK(principal_symbol_boundary(kExact, 0.0, north, 1.0, zero) == 0.0);
  CHECK(principal_symbol_boundary(kExact, 1.0, north, 1.0, zero) == doctest::Approx(-4.0));
  CHECK(principal_symbol_boundary(kExact, 0.0, north, 0.0, {0.5, 0.0, 0.0, 0.0}) == doctest::Approx(1.0));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int s = 0; s < 30; ++s) {
    std::vector<double> u{U(rng), U(rng), U(rng)}, xi{U(rng), U(rng), U(rng), U(rng)};
    const auto x = stereo_to_sphere(u);
    const double x0 = 0.5 * (U(rng) + 1.0);
    double xx = 0, ee = 0, xe = 0;
    for (int i = 0; i < 4; ++i) {
      xx += x[i] * x[i];
      ee += xi[i] * xi[i];
      xe += x[i] * xi[i];
    }
    const double round = (xx * ee - xe * xe) / xx;
    CHECK(boundary_dual_norm(kExact, x0, x, xi, End::Future) ==
          doctest::Approx(4.0 * round / ((1 + x0) * (1 + x0))).epsilon(1e-10));
  }
}

TEST_CASE("semiclassical symbol reduces to the principal symbol at omega_R = 0") {
  const auto xp = stereo_to_sphere({0.2, 0.4, -0.3});
  const std::vector<double> xi{0.7, 0.1, -0.2, 0.3, 0.05};
  for (double c : {0.05, 0.2, 0.35}) {
    const auto p = ChartPoint::collar(c, xp, End::Future);
    CHECK(semiclassical_symbol(kPert, p, xi, 0.0) ==
          doctest::Approx(principal_symbol_boundary(kPert, c, xp, xi[0], {xi.begin() + 1, xi.end()})));
  }
}

TEST_CASE("collar and interior symbols agree on the overlap") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (const auto& m : {kExact, kPert}) {
    for (int s = 0; s < 40; ++s) {
      const auto xp = stereo_to_sphere({U(rng), U(rng), U(rng)});
      const double c = 0.15 + 0.75 * 0.5 * (U(rng) + 1.0);
      const auto cp = ChartPoint::collar(c, xp, s % 2 ? End::Past : End::Future);
      const std::vector<double> xi{U(rng), U(rng), U(rng), U(rng), U(rng)};
      const double w = 2.0 * U(rng);
      const double a = semiclassical_symbol(m, cp, xi, w);
      const double b = semiclassical_symbol(m, to_interior(cp), collar_covector_to_interior(cp, xi), w);
      CHECK(a == doctest::Approx(b).epsilon(1e-9));
    }
  }
}

TEST_CASE("first-order correction in the canonical collar") {
  for (double h : {0.6, 1.0, -0.9}) {
    const auto fg = fg_corrections(kExact, ChartPoint::interior({h, 0.1, 0.2, -0.3}));
    CHECK(fg.F == doctest::Approx(4.0).epsilon(1e-8));
  }
}

TEST_CASE("imaginary part of the symbol") {
  const std::vector<double> xi{0.3, 0.5, -0.2, 0.1};
  const auto p = ChartPoint::interior({0.8, 0.2, -0.1, 0.3});
  SpectralParams sp;
  sp.omega_R = 1.3;
  sp.omega_I = 0.0;
  CHECK(std::abs(check_im_symbol_identity(kPert, p, xi, sp).lhs) < 1e-9);
  sp.omega_I = 0.4;
  const auto r = check_im_symbol_identity(kPert, p, xi, sp);
  CHECK(r.residual < 1e-6);
  ImSymbolOptions coarse;
  coarse.forward_difference = true;
  coarse.omega_step = 0.3;
  CHECK(check_im_symbol_identity(kPert, p, xi, sp, coarse).residual < 1e-6);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int s = 0; s < 50; ++s) {
    const auto q = ChartPoint::interior({1.5 * U(rng), U(rng), U(rng), U(rng)});
    SpectralParams t;
    t.omega_R = 2.0 * U(rng);
    t.omega_I = U(rng);
    CHECK(check_im_symbol_identity(kPert, q, {U(rng), U(rng), U(rng), U(rng)}, t).residual < 1e-6);
  }
}

TEST_CASE("collar form matches the conjugated wave operator") {
  const std::vector<double> u{0.3, -0.2, 0.1};
  const CollarFunction f = [](double c, const std::vector<double>& w) {
    return cplx(std::sin(2 * c) + w[0] * w[1] + 0.3 * w[2] * w[2], c * w[0]);
  };
  for (const auto& m : {kExact, kPert})
    for (cplx lam : {cplx(0.7, 0.3), cplx(-1.2, 0.0)})
      for (double c : {0.05, 0.2, 0.6}) {
        const cplx a = apply_collar_form(m, lam, f, c, u, End::Future, 1e-3);
        const cplx b = apply_conjugated_form(m, lam, f, c, u, End::Future, 1e-3);
        CHECK(std::abs(a - b) < 1e-5 * (1.0 + std::abs(a)));
      }
}

TEST_CASE("formal adjoint of P(lambda) is P(conj lambda)") {
  const auto xp = stereo_to_sphere({0.3, -0.2, 0.1});
  for (const auto& m : {kExact, kPert})
    for (double c : {-0.1, 0.0, 0.05, 0.15}) {
      const auto a = adjoint_residual(m, c, xp, End::Future, cplx(0.7, 0.0));
      CHECK(std::abs(a.first_order_residual) < 1e-12);
      CHECK(std::abs(a.zeroth_order_residual) < 1e-12);
    }
  const auto b = adjoint_residual(kPert, 0.1, xp, End::Future, cplx(0.7, 0.3));
  CHECK(std::abs(b.first_order_residual) < 1e-12);
  CHECK(std::abs(b.zeroth_order_residual) < 1e-12);
}

TEST_CASE("randomized symbol checks pass in every model") {
  for (auto k : {ModelKind::Flat, ModelKind::ExactDS, ModelKind::PerturbedDS}) {
    const auto r = run_symbol_checks(model(k, 0.05), 100, 1);
    CHECK(r.n_samples == 100);
    CHECK(r.failures.empty());
    CHECK(r.max_residual < 1e-6);
    CHECK(r.max_branch_diff < 1e-8);
    CHECK(r.max_adjoint < 1e-12);
  }
}
