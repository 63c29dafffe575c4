#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "dslab/normal_chart.hpp"

namespace dslab {

struct TransportParams {
  double radius = 0.2;
  int rays = 0;  // 0 selects the minimal fan of 2n^2 rays
  int samples = 20;
  // Tabulate u_k (k >= 1) on every sample of every ray; otherwise only the samples that feed u_diag.
  bool full_grid = true;
  double drift_tol = 0.05;  // two-resolution consistency gate
  std::optional<Eigen::MatrixXd> frame;
  std::uint64_t seed = 1;
};

struct TransportConvergence {
  std::vector<double> u_diag_coarse;  // same stencil at twice the step
  double max_relative_drift = 0.0;
};

struct TransportSolution {
  NormalChart chart;
  int N = 0;
  // u[k][ray][sample]; rows for k >= 1 hold only the tabulated samples (see full_grid).
  std::vector<std::vector<std::vector<double>>> u;
  std::vector<double> u_diag;
  // t * b^i eta_ij xhat^j along each ray, i.e. the contraction entering the ray ODE.
  std::vector<std::vector<double>> b_field;
  TransportConvergence convergence;
};

TransportSolution solve_transport(const SpacetimeModel& m, const ChartPoint& base, int N,
                                  const TransportParams& params = {});

std::vector<double> u_diag_series(const SpacetimeModel& m, const ChartPoint& base, int N,
                                  const TransportParams& params = {});

// Box operator of the normal-coordinate metric applied to u0 = |det g_N|^{-1/4} at X (off the origin).
double box_u0_at(const NormalChart& ch, const Eigen::VectorXd& X, double step);

}  // namespace dslab
