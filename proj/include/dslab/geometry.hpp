#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dslab/error.hpp"

namespace dslab {

enum class ModelKind { Flat, ExactDS, PerturbedDS };
enum class ChartKind { Interior, Collar };
enum class End { Future, Past };

std::string model_name(ModelKind k);
ModelKind parse_model(const std::string& s);

// Bump profile delta * b((x0 - center) / width) added to g0 along (dX1)^2 on the future end.
struct Perturbation {
  double amplitude = 0.0;
  double center = 0.06;
  double width = 0.04;
};

struct SpacetimeModel {
  ModelKind kind = ModelKind::ExactDS;
  int n = 4;
  Perturbation pert;
  double fd_step = 1e-4;
  double ext_margin = 0.25;  // collar accepts x0 >= -ext_margin (extension X)

  void validate() const;
};

// Interior coords: (h, u_1..u_{n-1}) with u stereographic (Flat: Minkowski (t, x_1..x_{n-1})).
// Collar coords: (x0, x'_1..x'_n) with |x'| = 1.
struct ChartPoint {
  ChartKind chart = ChartKind::Interior;
  std::vector<double> coords;
  End end = End::Future;

  static ChartPoint interior(std::vector<double> c) { return {ChartKind::Interior, std::move(c), End::Future}; }
  static ChartPoint collar(double x0, std::vector<double> xp, End e);
};

// Sphere helpers (stereographic projection from -e_n).
std::vector<double> stereo_to_sphere(const std::vector<double>& u);
std::vector<double> sphere_to_stereo(const std::vector<double>& x);

ChartPoint to_collar(const ChartPoint& p);
ChartPoint to_interior(const ChartPoint& p);

// Smooth bump exp(1 - 1/(1 - r^2)) on |r| < 1.
double bump(double r);

// Metric in the chart's own coordinates. Collar points use (x0, u) with u = stereographic(x').
Eigen::MatrixXd metric_eval(const SpacetimeModel& m, const ChartPoint& p);

// Boundary family g0(x0) in stereographic coordinates, (n-1) x (n-1).
Eigen::MatrixXd boundary_metric(const SpacetimeModel& m, double x0, const std::vector<double>& x_prime, End end);

// Sphere-part coupling k = 4 delta b(x0)/(1+x0)^2 (zero on the past end).
double perturbation_ratio(const SpacetimeModel& m, double x0, End end);

// Scalar curvature R = g^{ij} R_ij with R^r_{sij} = d_i Gamma^r_{js} - d_j Gamma^r_{is} + ..., R_ij = R^r_{irj}.
// Unit de Sitter gives R = -n(n-1) in this convention.
double scalar_curvature(const SpacetimeModel& m, const ChartPoint& p);

struct CurvatureData {
  Eigen::MatrixXd g, ginv, ricci;
  std::vector<Eigen::MatrixXd> gamma;  // gamma[k](i,j) = Gamma^k_ij
  double scalar = 0.0;
};
CurvatureData curvature_data(const SpacetimeModel& m, const ChartPoint& p);

// Interior-chart Christoffel symbols via automatic differentiation.
std::vector<Eigen::MatrixXd> christoffel(const SpacetimeModel& m, const std::vector<double>& x);

enum class GeodesicEnd { ReachedYPlus, ReachedYMinus, MaxTime };
std::string geodesic_end_name(GeodesicEnd e);

struct GeodesicSample {
  double t;
  double x0;  // collar variable e^{-2|h|}
  double h;
  std::vector<double> x_prime;
  std::vector<double> xi;  // (xi_T, xi_1..xi_n)
};

struct GeodesicPath {
  std::vector<GeodesicSample> samples;
  GeodesicEnd terminal = GeodesicEnd::MaxTime;
  double max_relative_drift = 0.0;  // drift of g(gamma', gamma') relative to its scale
};

struct GeodesicOptions {
  double boundary_tol = 1e-6;
  int max_samples = 2000;
};

// Integrates the geodesic of the rescaled metric y0^2 g through conformal time.
// v is given in interior coordinates (dh, du) at p.
GeodesicPath geodesic_trajectory(const SpacetimeModel& m, const ChartPoint& p, const std::vector<double>& v,
                                 double t_max, double tol, const GeodesicOptions& opt = {});

// Null vector at p: future-directed when future = true, spatial direction from dir (length n-1).
std::vector<double> null_vector(const SpacetimeModel& m, const ChartPoint& p, const std::vector<double>& dir,
                                bool future);

void write_geodesic_csv(const GeodesicPath& path, const std::string& file);

}  // namespace dslab
