#include <cmath>
#include <limits>

#include <catch2/catch_amalgamated.hpp>

#include "capdemand/demand.hpp"
#include "capdemand/fixture.hpp"
#include "capdemand/ols.hpp"
#include "capdemand/report.hpp"

using namespace capdemand;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

DemandCurve reference_curve_truncated() {
  const OlsFit fit = fit_ols(filter_window(bc_market_fixture(), kReferenceWindow));
  return truncate_to_3dp_millions(from_fit(fit));
}

}  // namespace

TEST_CASE("from_fit adopts the fitted line with the sign flipped") {
  const OlsFit fit = fit_ols(filter_window(bc_market_fixture(), kReferenceWindow));
  const DemandCurve curve = from_fit(fit);
  REQUIRE(curve.a == fit.intercept);
  REQUIRE(curve.b == -fit.slope);
  REQUIRE(curve.b > 0.0);
  REQUIRE(curve.base_year == 2012);
  REQUIRE(curve.provenance == CurveProvenance::fitted);
  // Curve predictions equal fitted values.
  for (const PricePoint& pt : filter_window(bc_market_fixture(), kReferenceWindow).pairs) {
    REQUIRE_THAT(quantity_at(curve, pt.price),
                 WithinRel(fit.intercept + fit.slope * pt.price, 1e-12));
  }
}

TEST_CASE("from_fit rejects upward-sloping or negative-intercept fits") {
  OlsFit fit;
  fit.slope = 2.0;
  fit.intercept = 10.0;
  REQUIRE_THROWS_AS(from_fit(fit), EstimationError);
  fit.slope = 0.0;
  REQUIRE_THROWS_AS(from_fit(fit), EstimationError);
  fit.slope = -2.0;
  fit.intercept = -10.0;
  REQUIRE_THROWS_AS(from_fit(fit), EstimationError);
}

TEST_CASE("specified construction validates both coefficients") {
  const DemandCurve c = DemandCurve::specified(483.509e6, 6.621e6);
  REQUIRE(c.provenance == CurveProvenance::specified);
  REQUIRE_THROWS_AS(DemandCurve::specified(0.0, 1.0), ValidationError);
  REQUIRE_THROWS_AS(DemandCurve::specified(-1.0, 1.0), ValidationError);
  REQUIRE_THROWS_AS(DemandCurve::specified(1.0, 0.0), ValidationError);
  REQUIRE_THROWS_AS(DemandCurve::specified(1.0, -1.0), ValidationError);
}

TEST_CASE("truncation cuts coefficients down to 3-decimal millions") {
  const DemandCurve t = reference_curve_truncated();
  // 483,509,626.10 -> 483,509,000; 6,621,291.95 -> 6,621,000 (cut, not rounded).
  REQUIRE(t.a == 483509000.0);
  REQUIRE(t.b == 6621000.0);
  REQUIRE(t.provenance == CurveProvenance::fitted);
  // Idempotent.
  const DemandCurve tt = truncate_to_3dp_millions(t);
  REQUIRE(tt.a == t.a);
  REQUIRE(tt.b == t.b);
}

TEST_CASE("truncated curve reproduces the published predicted quantities") {
  const DemandCurve t = reference_curve_truncated();
  REQUIRE_THAT(quantity_at(t, 23.0) / 1e6, WithinAbs(331.226, 1e-3));
  REQUIRE_THAT(quantity_at(t, 15.0) / 1e6, WithinAbs(384.194, 1e-3));
  REQUIRE_THAT(quantity_at(t, 14.0) / 1e6, WithinAbs(390.815, 1e-3));
  REQUIRE(quantity_at(t, 23.0) == 331226000.0);
  REQUIRE(quantity_at(t, 15.0) == 384194000.0);
  REQUIRE(quantity_at(t, 14.0) == 390815000.0);
}

TEST_CASE("quantity is the clamped linear form") {
  const DemandCurve c = DemandCurve::specified(100.0, 2.0);
  REQUIRE(quantity_at(c, 0.0) == 100.0);  // Q(0) = a
  REQUIRE(quantity_at(c, 10.0) == 80.0);
  REQUIRE(quantity_at(c, 50.0) == 0.0);   // exactly the choke price
  REQUIRE(quantity_at(c, 60.0) == 0.0);   // clamped above it
  REQUIRE_THROWS_AS(quantity_at(c, -0.1), DomainError);

  // Strictly decreasing below the choke price.
  double prev = quantity_at(c, 0.0);
  for (double p = 1.0; p < 50.0; p += 1.0) {
    const double q = quantity_at(c, p);
    REQUIRE(q < prev);
    prev = q;
  }
}

TEST_CASE("choke price marks where demand hits zero") {
  REQUIRE(choke_price(DemandCurve::specified(100.0, 100.0)) == 1.0);
  REQUIRE_THAT(choke_price(DemandCurve::specified(483.509e6, 6.621e6)),
               WithinAbs(73.027, 1e-3));
  const DemandCurve full =
      from_fit(fit_ols(filter_window(bc_market_fixture(), kReferenceWindow)));
  REQUIRE_THAT(choke_price(full), WithinAbs(73.0234567016760, 1e-9));
  // a - b*(a/b) only cancels to rounding error in doubles.
  REQUIRE_THAT(quantity_at(full, choke_price(full)), WithinAbs(0.0, 1e-4));
  REQUIRE(above_choke(full, 74.0));
  REQUIRE_FALSE(above_choke(full, 73.0));

  // Flat curve (test-only, unchecked): never chokes.
  const DemandCurve flat = DemandCurve::unchecked(50.0, 0.0);
  REQUIRE(std::isinf(choke_price(flat)));
  REQUIRE(quantity_at(flat, 1e9) == 50.0);
}

TEST_CASE("coefficients are recoverable from two evaluations") {
  const DemandCurve c = DemandCurve::specified(483509000.0, 6621000.0);
  const double a = quantity_at(c, 0.0);
  const double b = quantity_at(c, 0.0) - quantity_at(c, 1.0);
  REQUIRE(a == c.a);
  REQUIRE(b == c.b);
}
