#pragma once

#include <cmath>
#include <limits>
#include <string_view>

#include "capdemand/errors.hpp"
#include "capdemand/market_data.hpp"
#include "capdemand/ols.hpp"

namespace capdemand {

enum class CurveProvenance { fitted, specified };

inline std::string_view to_string(CurveProvenance p) {
  return p == CurveProvenance::fitted ? "fitted" : "specified";
}

/// Linear inverse demand Q(p) = a - b*p with b > 0. Quantities are real
/// CAD per year in `base_year` dollars; p is the fee in CAD per $100.
struct DemandCurve {
  double a = 0.0;
  double b = 0.0;
  int base_year = kBaseYear;
  CurveProvenance provenance = CurveProvenance::specified;

  /// Validated manual construction.
  static DemandCurve specified(double a, double b, int base_year = kBaseYear) {
    if (!(a > 0.0)) throw ValidationError("demand curve: intercept a must be positive");
    if (!(b > 0.0)) throw ValidationError("demand curve: slope magnitude b must be positive");
    return DemandCurve{a, b, base_year, CurveProvenance::specified};
  }

  /// Skips validation. For test oracles only (e.g. flat demand with b = 0).
  static DemandCurve unchecked(double a, double b, int base_year = kBaseYear,
                               CurveProvenance provenance = CurveProvenance::specified) {
    return DemandCurve{a, b, base_year, provenance};
  }
};

/// Adopts a fitted line as a demand curve; requires a downward slope.
inline DemandCurve from_fit(const OlsFit& fit, int base_year = kBaseYear) {
  if (!(fit.slope < 0.0)) {
    throw EstimationError("fitted slope is not negative: demand interpretation fails");
  }
  if (!(fit.intercept > 0.0)) {
    throw EstimationError("fitted intercept is not positive: demand interpretation fails");
  }
  return DemandCurve{fit.intercept, -fit.slope, base_year, CurveProvenance::fitted};
}

/// Price at which predicted quantity reaches zero.
inline double choke_price(const DemandCurve& curve) {
  if (curve.b == 0.0) return std::numeric_limits<double>::infinity();
  return curve.a / curve.b;
}

/// Predicted annual quantity at price p, floored at zero above the choke
/// price.
inline double quantity_at(const DemandCurve& curve, double price) {
  if (price < 0.0) throw DomainError("quantity_at: price must be non-negative");
  return std::max(curve.a - curve.b * price, 0.0);
}

inline bool above_choke(const DemandCurve& curve, double price) {
  return price > choke_price(curve);
}

}  // namespace capdemand
