#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>

#include "dslab/flow.hpp"
#include "dslab/operator.hpp"
#include "dslab/order_function.hpp"

using namespace dslab;

namespace {

SpacetimeModel model(ModelKind k, double delta = 0.0) {
  SpacetimeModel m;
  m.kind = k;
  m.pert.amplitude = delta;
  return m;
}

PhaseState radial_point(int sign, double rho = 0.0) {
  PhaseState s;
  s.x0 = 0.0;
  s.x_prime = {0.3, 0.0, 0.0, std::sqrt(1.0 - 0.09)};
  s.rho = rho;
  s.xi_hat0 = sign;
  s.xi_hat_prime = {0.0, 0.0, 0.0, 0.0};
  return s;
}

std::vector<Trajectory> ensemble(const SpacetimeModel& m, SymbolVariant v, const FlowParams& prm, int count,
                                 std::uint64_t seed) {
  std::vector<Trajectory> out;
  for (const auto& s : random_characteristic_states(m, v, prm, count, seed))
    for (double dir : {1.0, -1.0}) out.push_back(integrate_bicharacteristic(m, s, v, prm, dir * 200.0, 1e-10));
  return out;
}

}  // namespace

TEST_CASE("radial sets are invariant with source and sink behaviour") {
  const auto m = model(ModelKind::ExactDS);
  FlowParams prm;
  for (auto v : {SymbolVariant::Microlocal, SymbolVariant::Semiclassical}) {
    prm.omega_R = v == SymbolVariant::Semiclassical ? 1.0 : 0.0;
    for (int sg : {1, -1}) {
      const auto f0 = rescaled_hamiltonian_field(m, v, radial_point(sg), prm);
      CHECK(f0.x0 == 0.0);
      CHECK(f0.rho == 0.0);
      for (double c : f0.xi_hat_prime) CHECK(c == 0.0);
      const auto f = rescaled_hamiltonian_field(m, v, radial_point(sg, 1e-6), prm);
      CHECK(f.rho * sg < 0.0);
    }
  }
}

TEST_CASE("characteristic set and constraint") {
  const auto m = model(ModelKind::PerturbedDS, 0.05);
  FlowParams prm;
  for (const auto& s : random_characteristic_states(m, SymbolVariant::Microlocal, prm, 20, 3)) {
    CHECK(std::abs(rescaled_symbol(m, SymbolVariant::Microlocal, s, prm)) < 1e-10);
    CHECK(fiber_norm(m, s) == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK(parse_variant("semiclassical") == SymbolVariant::Semiclassical);
  CHECK_THROWS_AS(parse_variant("bogus"), Error);
}

TEST_CASE("microlocal flow classifies every trajectory") {
  for (const auto& m : {model(ModelKind::ExactDS), model(ModelKind::PerturbedDS, 0.05)}) {
    FlowParams prm;
    std::map<std::string, int> fwd, bwd;
    double drift = 0.0;
    const auto states = random_characteristic_states(m, SymbolVariant::Microlocal, prm, 100, 1);
    for (const auto& s : states) {
      const auto f = integrate_bicharacteristic(m, s, SymbolVariant::Microlocal, prm, 200.0, 1e-10);
      const auto b = integrate_bicharacteristic(m, s, SymbolVariant::Microlocal, prm, -200.0, 1e-10);
      fwd[f.terminal.name()]++;
      bwd[b.terminal.name()]++;
      drift = std::max({drift, f.max_constraint, b.max_constraint});
      CHECK(f.component == characteristic_component(m, SymbolVariant::Microlocal, s, prm));
      if (f.component == 1) {
        CHECK(f.terminal.name() == "Lambda^-_+");
        CHECK(b.terminal.name() == "Lambda^+_+");
      } else {
        CHECK(f.terminal.name() == "Lambda^+_-");
        CHECK(b.terminal.name() == "Lambda^-_-");
      }
    }
    CHECK(fwd["MaxTime"] == 0);
    CHECK(bwd["MaxTime"] == 0);
    CHECK(fwd["Lambda^-_+"] + fwd["Lambda^+_-"] == 100);
    CHECK(drift < 1e-6);
  }
}

TEST_CASE("microlocal and semiclassical fields coincide at omega_R = 0") {
  const auto m = model(ModelKind::PerturbedDS, 0.05);
  FlowParams prm;
  prm.omega_R = 0.0;
  for (const auto& s : random_characteristic_states(m, SymbolVariant::Microlocal, prm, 20, 5)) {
    const auto a = rescaled_hamiltonian_field(m, SymbolVariant::Microlocal, s, prm);
    const auto b = rescaled_hamiltonian_field(m, SymbolVariant::Semiclassical, s, prm);
    CHECK(a.x0 == doctest::Approx(b.x0).epsilon(1e-12));
    CHECK(a.rho == doctest::Approx(b.rho).epsilon(1e-12));
    CHECK(a.xi_hat0 == doctest::Approx(b.xi_hat0).epsilon(1e-12));
  }
}

TEST_CASE("radial quantities") {
  const auto m = model(ModelKind::ExactDS);
  FlowParams prm;
  for (int sg : {1, -1}) {
    prm.lambda = cplx(0.0, 0.3);
    const auto r = radial_quantities(m, sg, 6, prm);
    CHECK(r.components.size() == 2);
    for (double b : r.beta0) CHECK(b > 0.0);
    for (double b : r.beta_tilde) CHECK(b == doctest::Approx(-0.3).epsilon(1e-8));
    CHECK(r.beta1_lower > 0.0);
  }
  for (double im : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    prm.lambda = cplx(0.4, im);
    const auto r = radial_quantities(m, -1, 4, prm);
    for (double b : r.beta_tilde) CHECK(std::abs(b + im) < 1e-8);
  }
}

TEST_CASE("quadratic defining function decays near the radial set") {
  const auto m = model(ModelKind::ExactDS);
  FlowParams prm;
  const double beta1 = radial_quantities(m, -1, 4, prm).beta1_lower;
  auto s = radial_point(-1, 1e-3);
  s.xi_hat_prime = {0.0, 1e-2, 0.0, 0.0};
  for (int it = 0; it < 20; ++it) s.x0 = 0.25 * boundary_dual_norm(m, s.x0, s.x_prime, s.xi_hat_prime, s.end);
  normalize_state(m, s);
  REQUIRE(std::abs(rescaled_symbol(m, SymbolVariant::Microlocal, s, prm)) < 1e-12);
  auto rho1 = [](const PhaseState& p) {
    double v = p.rho * p.rho + p.x0 * p.x0;
    for (double c : p.xi_hat_prime) v += c * c;
    return v;
  };
  const auto tr = integrate_bicharacteristic(m, s, SymbolVariant::Microlocal, prm, -0.5, 1e-11);
  REQUIRE(tr.samples.size() > 2);
  const auto& a = tr.samples.front();
  const auto& b = tr.samples.back();
  const double rate = -(std::log(rho1(b.state)) - std::log(rho1(a.state))) / std::abs(b.t - a.t);
  CHECK(rate >= 0.5 * beta1);
}

TEST_CASE("semiclassical escape asymmetry") {
  // In this H_p orientation the non-escaping direction is forward for omega_R > 0.
  const auto m = model(ModelKind::ExactDS);
  FlowParams prm;
  for (double w : {1.0, -1.0}) {
    prm.omega_R = w;
    double min_stay = 1.0, min_other = 1.0;
    int escaped_other = 0;
    for (const auto& s : random_characteristic_states(m, SymbolVariant::Semiclassical, prm, 50, 2)) {
      const auto stay = integrate_bicharacteristic(m, s, SymbolVariant::Semiclassical, prm, w * 200.0, 1e-10);
      const auto other = integrate_bicharacteristic(m, s, SymbolVariant::Semiclassical, prm, -w * 200.0, 1e-10);
      min_stay = std::min(min_stay, stay.min_x0);
      min_other = std::min(min_other, other.min_x0);
      escaped_other += other.terminal.kind == FlowTerminal::Escaped;
      CHECK(stay.terminal.kind == FlowTerminal::RadialSet);
    }
    CHECK(min_stay >= -prm.boundary_margin);
    CHECK(min_other < -prm.boundary_margin);
    CHECK(escaped_other > 0);
  }
}

TEST_CASE("order functions are monotone along the flow") {
  const auto m = model(ModelKind::ExactDS);
  for (double w : {0.0, 1.0, -1.0}) {
    FlowParams prm;
    prm.omega_R = w;
    const auto v = w == 0.0 ? SymbolVariant::Microlocal : SymbolVariant::Semiclassical;
    const auto ens = ensemble(m, v, prm, 25, 3);
    for (auto var : {OrderVariant::F, OrderVariant::Fbar, OrderVariant::Ftr, OrderVariant::Past}) {
      CAPTURE(order_variant_name(var));
      double vp = 0.2, vm = 0.8;
      if (var == OrderVariant::Fbar || var == OrderVariant::Past) std::swap(vp, vm);
      const auto s = build_order_function(var, vp, vm, 0.5, v, prm);
      const auto r = verify_monotone(m, s, ens, 1e-8);
      CHECK(r.violations.empty());
      CHECK(r.samples > 1000);
      const auto bad = build_order_function(var, vm, vp, 0.5, v, prm, false, false);
      CHECK(!verify_monotone(m, bad, ens, 1e-8).violations.empty());
      const auto d = dual_order_function(s);
      CHECK(d.threshold == doctest::Approx(0.5));
      CHECK(verify_monotone(m, d, ens, 1e-8).violations.empty());
    }
  }
}

TEST_CASE("order function values and threshold") {
  const auto m = model(ModelKind::ExactDS);
  FlowParams prm;
  const auto s = build_order_function(OrderVariant::F, 0.2, 0.8, 0.5, SymbolVariant::Microlocal, prm);
  CHECK(s(m, radial_point(1)) == doctest::Approx(0.2));
  CHECK(s(m, radial_point(-1)) == doctest::Approx(0.8));
  auto near = radial_point(1, 1e-3);
  near.x0 = 0.5 * s.flat_x0();
  normalize_state(m, near);
  CHECK(s(m, near) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK_THROWS_AS(build_order_function(OrderVariant::F, 0.8, 0.2, 0.5, SymbolVariant::Microlocal, prm), Error);
  CHECK_THROWS_AS(build_order_function(OrderVariant::F, 0.2, 0.5, 0.5, SymbolVariant::Microlocal, prm), Error);
  const auto d = dual_order_function(s);
  CHECK(d(m, radial_point(1)) == doctest::Approx(0.8));
  CHECK(parse_order_variant(order_variant_name(OrderVariant::Past)) == OrderVariant::Past);
}
