#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dslab/geometry.hpp"
#include "json.hpp"

namespace dslab {

inline constexpr const char* kSpecVersion = "1.0";

// Resolved settings of one run. Keys of the config file match the long flag names with '-' replaced by '_'.
struct RunConfig {
  std::string subcommand;

  // model
  std::string model = "exact-ds";
  int n = 4;
  double delta = 0.05;
  double bump_center = 0.06;
  double bump_width = 0.04;
  double fd_step = 1e-4;

  std::uint64_t seed = 1;
  std::string out_dir = ".";
  bool emit_gnuplot = false;

  // interior base point (h, u_1..u_{n-1}); empty selects (0.3, 0.1, -0.2, 0, ...)
  std::vector<double> base;

  // flow
  std::string variant = "microlocal";
  double omega_r = 1.0;
  double lambda_re = 0.0;
  double lambda_im = 0.0;
  int ensemble = 200;
  double t_max = 200.0;
  double flow_tol = 1e-10;

  // transport and residue
  int order = 1;
  int rays = 0;
  int samples = 20;
  double radius = 0.2;
  bool grid_csv = false;
  std::vector<double> eps = {0.1, 0.05, 0.025, 0.0125};
  int sign = 1;
  int m = 1;
  double mu = 0.0;

  // contour
  double epsilon = 0.1;
  double eta = 4.0;
  double C = 2.0;
  double c = 1.0;
  double quad_tol = 1e-10;
  double x_right = 20.0;
  std::vector<double> alpha = {1.0, 1.5, 2.0, 3.0};
  std::vector<double> q = {0.5, 1.0, 2.0, 10.0};

  // symbol-check and curvature
  int n_samples = 100;
  double residual_tol = 1e-6;

  // Throws ConfigError on any invalid combination.
  void validate() const;
  SpacetimeModel spacetime_model() const;
  ChartPoint base_point() const;
  nlohmann::json to_json() const;
};

}  // namespace dslab
