#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dslab/geometry.hpp"
#include "dslab/numerics.hpp"

namespace dslab {

enum class SymbolVariant { Microlocal, Semiclassical };
std::string variant_name(SymbolVariant v);
SymbolVariant parse_variant(const std::string& s);

// Point of the fiber-compactified cotangent bundle over the collar: xi = xi_hat / rho.
struct PhaseState {
  double x0 = 0.0;
  std::vector<double> x_prime;       // unit vector in R^n
  double rho = 0.0;
  double xi_hat0 = 0.0;
  std::vector<double> xi_hat_prime;  // ambient covector tangent to the sphere at x_prime
  End end = End::Future;
};

struct FlowParams {
  double omega_R = 0.0;            // semiclassical variant only
  cplx lambda{0.0, 0.0};
  double capture_radius = 1e-4;
  double boundary_margin = 1e-6;
  double constraint_tol = 1e-6;
  int max_samples = 4000;
};

// rho^2 p in compactified coordinates; p = alpha (-4 x0 xi0^2 + |xi'|^2) + omega beta xi0 + omega^2 gamma.
double rescaled_symbol(const SpacetimeModel& m, SymbolVariant v, const PhaseState& s, const FlowParams& prm);

// xi_hat0^2 + |xi_hat'|^2_{g0}.
double fiber_norm(const SpacetimeModel& m, const PhaseState& s);

// rho H_p in (x0, x', rho, xi_hat0, xi_hat') with H_p = d_xi p . d_x - d_x p . d_xi.
PhaseState rescaled_hamiltonian_field(const SpacetimeModel& m, SymbolVariant v, const PhaseState& s,
                                      const FlowParams& prm);

// Sphere projection and fiber renormalization (xi = xi_hat / rho is preserved).
void normalize_state(const SpacetimeModel& m, PhaseState& s);

// Time orientation of the characteristic component containing s (+1 future, -1 past).
int characteristic_component(const SpacetimeModel& m, SymbolVariant v, const PhaseState& s, const FlowParams& prm);

enum class FlowTerminal { RadialSet, MaxTime, Escaped };

struct TerminalLabel {
  FlowTerminal kind = FlowTerminal::MaxTime;
  int set_sign = 0;  // L+ (+1) or L- (-1)
  int eps1 = 0;      // Y+ (+1) or Y- (-1)
  int eps2 = 0;      // component label of Lambda^{eps1}_{eps2}
  std::string set_name() const;
  std::string name() const;  // "Lambda^+_-", "MaxTime", "Escaped"
};

struct FlowSample {
  double t;
  PhaseState state;
};

struct Trajectory {
  std::vector<FlowSample> samples;
  TerminalLabel terminal;
  double time = 0.0;            // signed time at termination
  double max_constraint = 0.0;  // largest |rho^2 p| before projection
  double min_x0 = 0.0;          // smallest collar value visited
  int component = 0;
};

// Integrates forward for t_max > 0 and backward for t_max < 0.
Trajectory integrate_bicharacteristic(const SpacetimeModel& m, const PhaseState& s0, SymbolVariant v,
                                      const FlowParams& prm, double t_max, double tol);

// Random characteristic starts in the collar; component = +1/-1 selects Sigma_+/Sigma_-, 0 takes both.
std::vector<PhaseState> random_characteristic_states(const SpacetimeModel& m, SymbolVariant v,
                                                     const FlowParams& prm, int count, std::uint64_t seed,
                                                     int component = 0);

struct RadialSetReport {
  int set_sign = 0;
  std::vector<std::string> components;
  std::vector<double> beta0;
  std::vector<double> beta_tilde;
  std::vector<PhaseState> samples;
  double beta1_lower = 0.0;  // sampled decay rate of rho^2 + x0^2 + |xi_hat'|^2 near the set
};

RadialSetReport radial_quantities(const SpacetimeModel& m, int set_sign, int n_samples, const FlowParams& prm,
                                  std::uint64_t seed = 7);

}  // namespace dslab
