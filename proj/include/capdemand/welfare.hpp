#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "capdemand/demand.hpp"
#include "capdemand/errors.hpp"

namespace capdemand {

/// A cap change from p_from to p_to (CAD per $100), either direction.
struct Scenario {
  std::string label;
  double p_from = 0.0;
  double p_to = 0.0;
};

enum class WelfareMethod { closed_form, quadrature };

inline std::string_view to_string(WelfareMethod m) {
  return m == WelfareMethod::closed_form ? "closed_form" : "quadrature";
}

/// Consumer-surplus change for one scenario, with the predicted quantities
/// at both prices. delta_cs is real CAD per year in the curve's base year.
struct WelfareResult {
  Scenario scenario;
  double q_from = 0.0;
  double q_to = 0.0;
  double delta_cs = 0.0;
  WelfareMethod method = WelfareMethod::closed_form;
};

namespace detail {

inline void check_scenario_prices(const Scenario& s) {
  if (s.p_from < 0.0 || s.p_to < 0.0) {
    throw DomainError("scenario prices must be non-negative");
  }
}

// Antiderivative of the clamped demand curve max(a - b*p, 0). Above the
// choke price the integrand is zero, so the antiderivative is constant.
inline double clamped_area_to(const DemandCurve& curve, double price) {
  const double p = curve.b > 0.0 ? std::min(price, choke_price(curve)) : price;
  return curve.a * p - 0.5 * curve.b * p * p;
}

}  // namespace detail

/// Exact consumer-surplus change: (1/100) * integral of the clamped demand
/// curve from p_to to p_from. The 1/100 converts the fee (quoted per $100)
/// to a per-dollar price; it is applied here and nowhere else.
inline WelfareResult cs_change_closed(const DemandCurve& curve, const Scenario& s) {
  detail::check_scenario_prices(s);
  const double area = detail::clamped_area_to(curve, s.p_from) -
                      detail::clamped_area_to(curve, s.p_to);
  return WelfareResult{s, quantity_at(curve, s.p_from), quantity_at(curve, s.p_to), area / 100.0,
                       WelfareMethod::closed_form};
}

/// Composite-trapezoid evaluation of the same integral; exact for linear
/// demand below the choke price with any panel count.
inline WelfareResult cs_change_quadrature(const DemandCurve& curve, const Scenario& s,
                                          int n_panels) {
  detail::check_scenario_prices(s);
  if (n_panels < 1) throw DomainError("quadrature needs at least one panel");
  const double h = (s.p_from - s.p_to) / n_panels;
  double sum = 0.5 * (quantity_at(curve, s.p_to) + quantity_at(curve, s.p_from));
  for (int i = 1; i < n_panels; ++i) {
    sum += quantity_at(curve, s.p_to + i * h);
  }
  return WelfareResult{s, quantity_at(curve, s.p_from), quantity_at(curve, s.p_to),
                       h * sum / 100.0, WelfareMethod::quadrature};
}

/// Evaluates scenarios in order; a failure is reported with the scenario's
/// label attached. Sequential, so results are reproducible byte for byte.
inline std::vector<WelfareResult> run_scenarios(const DemandCurve& curve,
                                                const std::vector<Scenario>& scenarios,
                                                WelfareMethod method = WelfareMethod::closed_form,
                                                int n_panels = 256) {
  if (scenarios.empty()) throw ScenarioError("no scenarios given");
  std::vector<WelfareResult> results;
  results.reserve(scenarios.size());
  for (const Scenario& s : scenarios) {
    try {
      results.push_back(method == WelfareMethod::closed_form
                            ? cs_change_closed(curve, s)
                            : cs_change_quadrature(curve, s, n_panels));
    } catch (const Error& e) {
      throw ScenarioError("scenario '" + s.label + "': " + e.what());
    }
  }
  return results;
}

}  // namespace capdemand
