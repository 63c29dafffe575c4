#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "dslab/geometry.hpp"

namespace dslab {

struct RaySample {
  double t = 0.0;
  std::vector<double> point;  // interior coordinates of exp(t E x)
  Eigen::MatrixXd gN;         // pulled-back metric in normal coordinates
};

struct NormalChart {
  SpacetimeModel model;
  ChartPoint base;  // interior chart
  Eigen::MatrixXd frame;  // columns e_mu with frame^T g frame = eta
  double radius = 0.2;
  std::vector<Eigen::VectorXd> ray_directions;
  int samples_per_ray = 20;
  int fan_size = 0;  // the first fan_size directions are +-e_i, +-(e_i +- e_j)/sqrt2
  std::vector<std::vector<RaySample>> grid;  // [ray][sample], sample m at t = m * radius / samples
  double shoot_tol = 1e-12;

  double step() const { return radius / samples_per_ray; }
  int dim() const { return model.n; }
};

struct NormalChartOptions {
  std::optional<Eigen::MatrixXd> frame;
  double shoot_tol = 1e-12;
  std::uint64_t seed = 1;
  bool verify_inverse = true;
};

Eigen::MatrixXd minkowski_eta(int n);

// Time-oriented orthonormal frame at base by Gram-Schmidt from the coordinate basis.
Eigen::MatrixXd default_frame(const SpacetimeModel& m, const ChartPoint& base);

// Fan of 2n^2 directions plus (rays - 2n^2) seeded random unit directions.
std::vector<Eigen::VectorXd> ray_fan(int n, int rays, std::uint64_t seed);

NormalChart build_normal_chart(const SpacetimeModel& m, const ChartPoint& base, double radius, int rays,
                               int samples, const NormalChartOptions& opt = {});

struct ShootResult {
  std::vector<double> point;
  Eigen::MatrixXd jacobian;  // d exp(E X) / dX
  Eigen::MatrixXd gN;
};

// exp_base(E X) with the Jacobi-field Jacobian, integrated over [0, 1].
ShootResult shoot(const NormalChart& ch, const Eigen::VectorXd& X);

// Newton inversion of the shooting map.
Eigen::VectorXd inv_exp(const NormalChart& ch, const std::vector<double>& q, double tol = 1e-12, int max_iter = 50);

}  // namespace dslab
