#include "dslab/order_function.hpp"

#include <algorithm>
#include <cmath>

#include "dslab/error.hpp"

namespace dslab {

std::string order_variant_name(OrderVariant v) {
  switch (v) {
    case OrderVariant::Ftr: return "s_ftr";
    case OrderVariant::Past: return "s_past";
    case OrderVariant::F: return "s_F";
    case OrderVariant::Fbar: return "s_Fbar";
  }
  return "";
}

OrderVariant parse_order_variant(const std::string& s) {
  if (s == "s_ftr" || s == "ftr") return OrderVariant::Ftr;
  if (s == "s_past" || s == "past") return OrderVariant::Past;
  if (s == "s_F" || s == "F") return OrderVariant::F;
  if (s == "s_Fbar" || s == "Fbar") return OrderVariant::Fbar;
  fail(ErrorCode::ConfigError, "unknown order variant '" + s + "'");
}

namespace {

double time_coordinate(const PhaseState& s) {
  const int e1 = s.end == End::Future ? 1 : -1;
  if (s.x0 <= 0.0) return e1;
  const double h = -0.5 * e1 * std::log(s.x0);
  return 2.0 / kPi * std::atan(std::sinh(h));
}

bool straddles(OrderVariant v, double vp, double vm, double S) {
  switch (v) {
    case OrderVariant::Ftr:
    case OrderVariant::F: return vp < S && S < vm;
    case OrderVariant::Past:
    case OrderVariant::Fbar: return vp > S && S > vm;
  }
  return false;
}

}  // namespace

double OrderFunction::operator()(const SpacetimeModel& m, const PhaseState& s) const {
  const double tau = time_coordinate(s);
  double sigma;
  if (variant == OrderVariant::F || variant == OrderVariant::Fbar) {
    int eps = characteristic_component(m, symbol, s, params);
    sigma = (eps == 0 ? 1 : eps) * tau;
  } else {
    sigma = -tau;
  }
  const double a = 1.0 - flat_width;
  const double w = smooth_step((sigma + a) / (2.0 * a));
  return value_plus + (value_minus - value_plus) * w;
}

double OrderFunction::flat_x0() const {
  const double h = std::asinh(std::tan(0.5 * kPi * (1.0 - flat_width)));
  return std::exp(-2.0 * h);
}

int OrderFunction::monotone_sign(int component) const {
  int r = 0;
  switch (variant) {
    case OrderVariant::F: r = -1; break;
    case OrderVariant::Fbar: r = 1; break;
    case OrderVariant::Ftr: r = component >= 0 ? 1 : -1; break;
    case OrderVariant::Past: r = component >= 0 ? -1 : 1; break;
  }
  return dual ? -r : r;
}

OrderFunction build_order_function(OrderVariant variant, double value_plus, double value_minus, double threshold,
                                   SymbolVariant symbol, const FlowParams& params, bool dual, bool validate) {
  if (validate) {
    bool ok = dual ? straddles(variant, 1.0 - value_plus, 1.0 - value_minus, 1.0 - threshold)
                   : straddles(variant, value_plus, value_minus, threshold);
    if (!ok) fail(ErrorCode::ThresholdViolation, order_variant_name(variant) + ": radial values do not straddle the threshold");
  }
  OrderFunction s;
  s.variant = variant;
  s.dual = dual;
  s.value_plus = value_plus;
  s.value_minus = value_minus;
  s.threshold = threshold;
  s.symbol = symbol;
  s.params = params;
  return s;
}

OrderFunction dual_order_function(const OrderFunction& s) {
  OrderFunction d = s;
  d.dual = !s.dual;
  d.value_plus = 1.0 - s.value_plus;
  d.value_minus = 1.0 - s.value_minus;
  d.threshold = 1.0 - s.threshold;
  return d;
}

MonotoneReport verify_monotone(const SpacetimeModel& m, const OrderFunction& s, const std::vector<Trajectory>& ensemble,
                               double tol) {
  MonotoneReport rep;
  rep.trajectories = ensemble.size();
  for (size_t k = 0; k < ensemble.size(); ++k) {
    const Trajectory& tr = ensemble[k];
    const int want = s.monotone_sign(tr.component);
    double prev = s(m, tr.samples.front().state);
    for (size_t j = 1; j < tr.samples.size(); ++j) {
      const double cur = s(m, tr.samples[j].state);
      const double dt = tr.samples[j].t - tr.samples[j - 1].t;
      if (dt == 0.0) continue;
      const double rate = want * (cur - prev) / dt;
      ++rep.samples;
      rep.worst_rate = std::min(rep.worst_rate, rate);
      if (rate < -tol) rep.violations.push_back({k, tr.samples[j].t, rate, tr.samples[j].state});
      prev = cur;
    }
  }
  return rep;
}

}  // namespace dslab
