#pragma once

#include <string>
#include <vector>

#include "dslab/flow.hpp"

namespace dslab {

enum class OrderVariant { Ftr, Past, F, Fbar };
std::string order_variant_name(OrderVariant v);
OrderVariant parse_order_variant(const std::string& s);

// Variable order built from the flow-adapted coordinate sigma: time-orientation times
// tau = (2/pi) atan(sinh h) for F and Fbar, and -tau for ftr and past. The order is
// constant where |sigma| >= 1 - flat_width and at every point with x0 <= 0.
struct OrderFunction {
  OrderVariant variant = OrderVariant::F;
  bool dual = false;        // the starred order for the adjoint problem
  double value_plus = 0.0;  // at L+ (F, Fbar) or at Lambda^+ (ftr, past)
  double value_minus = 1.0; // at L- (F, Fbar) or at Lambda^- (ftr, past)
  double threshold = 0.5;
  double flat_width = 0.1;
  SymbolVariant symbol = SymbolVariant::Microlocal;
  FlowParams params;

  double operator()(const SpacetimeModel& m, const PhaseState& s) const;
  // Collar values x0 below which the order is constant (one-sided neighbourhood of the radial sets).
  double flat_x0() const;
  // Required monotonicity along the forward flow on Sigma_{component}: +1 non-decreasing, -1 non-increasing.
  int monotone_sign(int component) const;
};

// Throws ThresholdViolation when the values do not straddle the threshold as the variant requires.
OrderFunction build_order_function(OrderVariant variant, double value_plus, double value_minus, double threshold,
                                   SymbolVariant symbol, const FlowParams& params, bool dual = false,
                                   bool validate = true);

// 1 - s with threshold 1 - S.
OrderFunction dual_order_function(const OrderFunction& s);

struct MonotoneViolation {
  size_t trajectory = 0;
  double t = 0.0;
  double rate = 0.0;
  PhaseState state;
};

struct MonotoneReport {
  size_t trajectories = 0;
  size_t samples = 0;
  double worst_rate = 0.0;  // most negative signed rate (sign-adjusted to the required direction)
  std::vector<MonotoneViolation> violations;
};

MonotoneReport verify_monotone(const SpacetimeModel& m, const OrderFunction& s, const std::vector<Trajectory>& ensemble,
                               double tol);

}  // namespace dslab
