#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dslab/geometry.hpp"
#include "dslab/hadamard.hpp"
#include "dslab/numerics.hpp"

namespace dslab {

enum class ContourPiece { Upper, Cap, Lower };

// gamma_eps: z(t) = -(t + e^{i pi/4} sqrt(eps) + i C)^2 - (n-1)^2/4 for t <= -eta,
// the same with c in place of C for t >= eta, and a polyline cap in between.
// The cap runs down to height eps/2, passes under i eps, and crosses the real axis at x_right.
struct ContourSpec {
  double epsilon = 0.1;
  double eta = 4.0;
  double C = 2.0;
  double c = 1.0;
  int n = 4;
  double x_right = 20.0;
  double t_cut = 0.0;
  double quad_tol = 1e-10;
  int order = 0;  // Gauss nodes per panel
  std::vector<cplx> cap_vertices;
  std::vector<cplx> z;         // nodes
  std::vector<cplx> dz;        // complex weights
  std::vector<double> spacing;  // local node spacing
  std::vector<ContourPiece> piece;

  cplx branch(double t) const;
  cplx branch_derivative(double t) const;
  // min |Im z| over cap nodes, and min |z - i eps| over cap nodes.
  double cap_min_abs_imag() const;
  double cap_min_distance_to_pole() const;
  // Integrand norm of the resolvent bound at t_cut over 1/((c + eps/sqrt 2) t^2), Re alpha = 1.
  double tail_envelope_ratio() const;
};

ContourSpec build_contour(double epsilon, double eta = 4.0, double C = 2.0, double c = 1.0, double quad_tol = 1e-10,
                          int n = 4, double x_right = 20.0);

// (w)^{-alpha} with arg w in (-3 pi/2, pi/2]: the cut runs upward from w = 0.
cplx power_upper_cut(cplx w, cplx alpha);

// (1/2 pi i) int (z - i eps)^{-alpha} f(z) dz over the truncated contour.
cplx contour_integral(const ContourSpec& spec, cplx alpha, const std::function<cplx(cplx)>& f);

// Integral of f over the truncated contour closed by the segment gamma(t_cut) -> gamma(-t_cut).
cplx closed_loop_integral(const ContourSpec& spec, const std::function<cplx(cplx)>& f);

// (1/2 pi i) int (z - i eps)^{-alpha} Gamma(k+1) (q - z)^{-k-1} dz; k = 0 gives (q - i eps)^{-alpha}.
cplx scalar_power_via_contour(double q, cplx alpha, const ContourSpec& spec, int k = 0);

// (-1)^k Gamma(1-alpha) / (Gamma(1-alpha-k) Gamma(alpha+k)).
cplx fk_contour_coefficient(cplx alpha, int k);

// Diagonal of F_beta(z, .) in flat R^{1,n-1}:
// sign(Im z) i Gamma(beta + 1 - n/2) (-z)^{n/2 - beta - 1} / (2^n pi^{n/2}).
struct FlatDiagValue {
  cplx value{0.0, 0.0};
  bool pole = false;
};
FlatDiagValue flat_diag_F_checked(cplx beta, cplx z, int n);
cplx flat_diag_F(cplx beta, cplx z, int n);

// Direct evaluation of the defining integral for n = 2, xi0 rotated by e^{+-i pi/4}.
cplx flat_diag_F_oracle_n2(cplx beta, cplx z, double tol = 1e-10);

// sum_k u_k c_k(alpha) F_{k+alpha-1}(z) for k = 0..N.
cplx hadamard_power_diag(const std::vector<double>& u_diag, cplx alpha, cplx z_shift, int n, int N);

// (1/2 pi i) circle integral of f around alpha0 by the trapezoid rule.
cplx residue_at(const std::function<cplx(cplx)>& f, cplx alpha0, double radius = 0.25, int nodes = 64);

struct ResidueOptions {
  int m = 1;           // residue at alpha = n/2 - m
  double mu = 0.0;     // spectral shift
  int sign = 1;        // z = mu + sign * i eps
  double radius = 0.25;
  int nodes = 64;
  TransportParams transport;
};

struct ResidueReport {
  int n = 0;
  int m = 1;
  int sign = 1;
  double alpha0 = 0.0;
  std::vector<double> eps_sequence;
  std::vector<cplx> residues;
  cplx extrapolated{0.0, 0.0};
  double extrapolation_error = 0.0;
  std::vector<double> u_diag;
  double scalar_curvature = 0.0;
  cplx curvature_oracle{0.0, 0.0};  // sign i R / (6 (4 pi)^{n/2} (n/2-2)!)
  cplx transport_oracle{0.0, 0.0};  // sign i u_m / (2^n pi^{n/2} (n/2-m-1)!)
  double rel_err = 0.0;             // | |res| - |curvature_oracle| | / |curvature_oracle|
  double transport_rel_err = 0.0;   // |res - transport_oracle| / |transport_oracle|
  int sign_vs_curvature = 0;        // +1 when res / curvature_oracle > 0, -1 when < 0
  int sign_vs_transport = 0;
};

ResidueReport spectral_action_residue(const SpacetimeModel& m, const ChartPoint& base,
                                      const std::vector<double>& eps_sequence, const ResidueOptions& opt = {});

}  // namespace dslab
