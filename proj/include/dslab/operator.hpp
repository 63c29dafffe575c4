#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dslab/dual.hpp"
#include "dslab/geometry.hpp"
#include "dslab/model_metric.hpp"
#include "dslab/numerics.hpp"

namespace dslab {

// Spectral parameter z and lambda(z) = sqrt(-z - (n-1)^2/4) on the closed upper half-plane.
cplx lambda_of_z(cplx z, int n);
cplx z_of_lambda(cplx lambda, int n);

struct SpectralParams {
  cplx lambda{0.0, 0.0};
  double omega_R = 1.0;
  double omega_I = 0.0;
  double h = 1.0;
  double mu = 0.0;
  cplx z{0.0, 0.0};

  double threshold() const { return 0.5 - lambda.imag(); }  // S(lambda)
  static SpectralParams from_z(cplx z, int n);
};

// P(lambda) = a2 d^2 + a1 d + a0 + laplacian_weight * Delta_{g0} in the collar (d = d/dx0).
struct CollarOperatorCoeffs {
  double a2 = 0.0;
  cplx a1{0.0, 0.0};
  cplx a0{0.0, 0.0};
  double laplacian_weight = -1.0;
  double gamma = 0.0;
};

// gamma = d/dx0 log sqrt(det g0) by finite differences.
double gamma_coeff(const SpacetimeModel& m, double x0, const std::vector<double>& x_prime, End end);

CollarOperatorCoeffs collar_coeffs(const SpacetimeModel& m, double x0, const std::vector<double>& x_prime, End end,
                                   cplx lambda);

// |xi'|^2_{g0} for an ambient covector xi' at x' on the sphere.
double boundary_dual_norm(const SpacetimeModel& m, double x0, const std::vector<double>& x_prime,
                          const std::vector<double>& xi_prime, End end);

double principal_symbol_boundary(const SpacetimeModel& m, double x0, const std::vector<double>& x_prime, double xi0,
                                 const std::vector<double>& xi_prime, End end = End::Future);

// Collar-variable profile of the semiclassical symbol for the smooth boundary defining function:
// p = alpha (-4 x0 xi0^2 + |xi'|^2) + omega beta xi0 + omega^2 gamma; (1, 4, 0) in the canonical collar.
template <class T>
void symbol_profile(const T& c, T& alpha, T& beta, T& gamma) {
  if (c <= std::exp(-1.0)) {
    alpha = T(1.0);
    beta = T(4.0);
    gamma = T(0.0);
    return;
  }
  using D = Dual<T, 1>;
  T h = -0.5 * log(c);
  D hd(h);
  hd.d[0] = T(1.0);
  D xs = smooth_bdf(hd);
  T x0s = xs.v;
  T dxs = xs.d[0] * (-0.5 / c);  // d x0_s / dc
  alpha = c / x0s;
  beta = 4.0 * c * c * dxs / (x0s * x0s);
  gamma = (1.0 - c * c * dxs * dxs / (x0s * x0s)) / x0s;
}

// Smooth boundary defining function on the interior chart (constant for the flat model).
double interior_bdf(const SpacetimeModel& m, const std::vector<double>& x);

// Semiclassical principal symbol. Interior points: xi in (h, u) components, smooth x0.
// Collar points: xi = (xi0, xi'_ambient).
double semiclassical_symbol(const SpacetimeModel& m, const ChartPoint& p, const std::vector<double>& xi,
                            double omega_R);

// Collar covector (xi0, xi') at a collar point expressed in interior (h, u) components.
std::vector<double> collar_covector_to_interior(const ChartPoint& collar_point, const std::vector<double>& xi);

struct FGCorrections {
  double F = 0.0;
  std::vector<double> G_vec;  // coefficient of d_j
  double G0 = 0.0;            // zeroth-order part
};
FGCorrections fg_corrections(const SpacetimeModel& m, const ChartPoint& p);

struct ImSymbolCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
};

struct ImSymbolOptions {
  double omega_step = 1e-5;
  bool forward_difference = false;  // coarse diagnostic mode
};

ImSymbolCheck check_im_symbol_identity(const SpacetimeModel& m, const ChartPoint& p, const std::vector<double>& xi,
                                       const SpectralParams& params, const ImSymbolOptions& opt = {});

// Functions on the collar chart in (x0, u) coordinates.
using CollarFunction = std::function<cplx(double x0, const std::vector<double>& u)>;

// Collar form of P(lambda) applied to f at (x0, u).
cplx apply_collar_form(const SpacetimeModel& m, cplx lambda, const CollarFunction& f, double x0,
                       const std::vector<double>& u, End end, double step);

// x0^{i lambda/2 - (n+3)/4} (box_g + lambda^2 + (n-1)^2/4) x0^{(n-1)/4 - i lambda/2} applied to f.
cplx apply_conjugated_form(const SpacetimeModel& m, cplx lambda, const CollarFunction& f, double x0,
                           const std::vector<double>& u, End end, double step);

struct AdjointCheck {
  cplx first_order_residual;
  cplx zeroth_order_residual;
};

// Coefficients of P(lambda) - P(conj lambda)^* with respect to J dx0 dx'.
AdjointCheck adjoint_residual(const SpacetimeModel& m, double x0, const std::vector<double>& x_prime, End end,
                              cplx lambda);

struct SymbolCheckFailure {
  std::string check;
  std::vector<double> point;
  std::vector<double> xi;
  double omega_R = 0.0;
  double omega_I = 0.0;
  double residual = 0.0;
};

struct SymbolCheckReport {
  int n_samples = 0;
  double max_residual = 0.0;   // Im-symbol identity
  double mean_residual = 0.0;
  double max_branch_diff = 0.0;  // interior vs collar symbol
  double max_adjoint = 0.0;      // coefficient cancellation for real lambda
  std::vector<SymbolCheckFailure> failures;
};

// Seeded random samples: interior points with |h| <= 1.5, |u_i| <= 1, xi in [-1, 1]^n,
// omega_R in [-2, 2], omega_I in [-1, 1]; collar points with x0 in [0.15, 0.9] for the branch check
// and |x0| <= 0.2 with real lambda for the adjoint cancellation (rounding level only).
SymbolCheckReport run_symbol_checks(const SpacetimeModel& m, int n_samples, std::uint64_t seed, double tol = 1e-6,
                                    double branch_tol = 1e-8, double adjoint_tol = 1e-12);

}  // namespace dslab
