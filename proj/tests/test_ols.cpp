#include <array>
#include <cmath>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "capdemand/fixture.hpp"
#include "capdemand/market_data.hpp"
#include "capdemand/ols.hpp"

using namespace capdemand;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

OlsFit reference_fit(HcFlavor flavor = kDefaultHcFlavor) {
  return fit_ols(filter_window(bc_market_fixture(), kReferenceWindow), flavor);
}

// Independent oracle: the sandwich (X'X)^-1 X' diag(w) X (X'X)^-1 computed
// with explicit uncentered 2x2 matrix algebra, no shared code with the
// library's centered linear-statistic form.
CoefCovariance brute_force_sandwich(const std::vector<double>& p, const std::vector<double>& w) {
  const int n = static_cast<int>(p.size());
  double sxx = 0.0, sx = 0.0;
  for (double pi : p) {
    sx += pi;
    sxx += pi * pi;
  }
  // (X'X) = [[n, sx], [sx, sxx]]; invert directly.
  const double det = n * sxx - sx * sx;
  const std::array<double, 4> inv = {sxx / det, -sx / det, -sx / det, n / det};
  // M = X' diag(w) X = [[sum w, sum w p], [sum w p, sum w p^2]]
  double m00 = 0.0, m01 = 0.0, m11 = 0.0;
  for (int i = 0; i < n; ++i) {
    m00 += w[i];
    m01 += w[i] * p[i];
    m11 += w[i] * p[i] * p[i];
  }
  // S = inv * M * inv, symmetric 2x2.
  const double t00 = inv[0] * m00 + inv[1] * m01;
  const double t01 = inv[0] * m01 + inv[1] * m11;
  const double t10 = inv[2] * m00 + inv[3] * m01;
  const double t11 = inv[2] * m01 + inv[3] * m11;
  CoefCovariance cov;
  cov.var_intercept = t00 * inv[0] + t01 * inv[1];
  cov.covariance = t00 * inv[2] + t01 * inv[3];
  cov.var_slope = t10 * inv[2] + t11 * inv[3];
  return cov;
}

}  // namespace

TEST_CASE("reference window fit reproduces the published coefficients") {
  const OlsFit fit = reference_fit();
  REQUIRE(fit.n == 8);
  REQUIRE(fit.k == 2);
  REQUIRE(fit.df1 == 1);
  REQUIRE(fit.df2 == 6);
  REQUIRE_THAT(fit.slope, WithinRel(-6621526.0, 1e-3));
  REQUIRE_THAT(fit.intercept, WithinRel(483509000.0, 1e-3));
  REQUIRE_THAT(fit.r_squared, WithinAbs(0.5154, 2e-3));
  // Full-precision frozen values.
  REQUIRE_THAT(fit.slope, WithinRel(-6621291.951141007, 1e-10));
  REQUIRE_THAT(fit.intercept, WithinRel(483509626.10330844, 1e-10));
  REQUIRE_THAT(fit.r_squared, WithinAbs(0.5160416249431321, 1e-12));
  REQUIRE_THAT(fit.rss, WithinRel(1941553888220643.2, 1e-10));
  REQUIRE_THAT(fit.tss, WithinRel(4011820000000000.0, 1e-10));
}

TEST_CASE("classical standard errors match the published inference") {
  const OlsFit fit = reference_fit();
  REQUIRE_THAT(fit.se_slope_classical, WithinRel(2618230.0, 1e-3));
  REQUIRE_THAT(fit.se_intercept_classical, WithinRel(52700000.0, 1e-3));
  REQUIRE_THAT(fit.se_slope_classical, WithinRel(2617753.50795664, 1e-10));
  REQUIRE_THAT(fit.se_intercept_classical, WithinRel(52713964.39841741, 1e-10));
  REQUIRE_THAT(fit.f_classical, WithinAbs(6.38, 0.05));
  REQUIRE_THAT(fit.f_classical, WithinRel(6.397760446433161, 1e-10));
  REQUIRE_THAT(fit.p_value_classical, WithinAbs(0.0449, 0.002));
  REQUIRE_THAT(fit.p_value_classical, WithinAbs(0.04471713662851667, 1e-12));
}

TEST_CASE("each HC flavor reproduces its frozen standard errors") {
  struct Expected {
    HcFlavor flavor;
    double se_intercept, se_slope, f, p;
  };
  const Expected table[] = {
      {HcFlavor::hc0, 28021812.991615, 1663138.751861, 15.8499723616, 0.0072732502},
      {HcFlavor::hc1, 32356802.547781, 1920427.212173, 11.8874792712, 0.0136693713},
      {HcFlavor::hc2, 31687852.438060, 1869837.492417, 12.5394286266, 0.0122025693},
      {HcFlavor::hc3, 36267533.295921, 2118932.125891, 9.7645308997, 0.0204588681},
  };
  for (const Expected& e : table) {
    const OlsFit fit = reference_fit(e.flavor);
    INFO("flavor " << to_string(e.flavor));
    REQUIRE(fit.hc_flavor == e.flavor);
    REQUIRE_THAT(fit.se_intercept, WithinRel(e.se_intercept, 1e-10));
    REQUIRE_THAT(fit.se_slope, WithinRel(e.se_slope, 1e-10));
    REQUIRE_THAT(fit.f_stat, WithinRel(e.f, 1e-8));
    REQUIRE_THAT(fit.p_value, WithinRel(e.p, 1e-6));
    // Coefficients do not depend on the flavor.
    REQUIRE(fit.slope == reference_fit().slope);
    REQUIRE(fit.intercept == reference_fit().intercept);
  }
}

TEST_CASE("leverages follow the closed form and sum to k") {
  const OlsFit fit = reference_fit();
  const double expected[] = {0.17328511, 0.18692293, 0.2022549, 0.18692293,
                             0.18692293, 0.13508225, 0.33780304, 0.5908059};
  double sum = 0.0;
  for (int i = 0; i < fit.n; ++i) {
    REQUIRE_THAT(fit.leverages[i], WithinAbs(expected[i], 1e-8));
    sum += fit.leverages[i];
  }
  REQUIRE_THAT(sum, WithinAbs(2.0, 1e-12));
}

TEST_CASE("HC covariances agree with a brute-force matrix oracle") {
  const OlsFit fit = reference_fit();
  std::vector<double> prices;
  for (const PricePoint& pt : filter_window(bc_market_fixture(), kReferenceWindow).pairs) {
    prices.push_back(pt.price);
  }
  for (HcFlavor flavor : {HcFlavor::hc0, HcFlavor::hc1, HcFlavor::hc2, HcFlavor::hc3}) {
    std::vector<double> w(fit.n);
    for (int i = 0; i < fit.n; ++i) {
      const double e2 = fit.residuals[i] * fit.residuals[i];
      const double omh = 1.0 - fit.leverages[i];
      switch (flavor) {
        case HcFlavor::hc0: w[i] = e2; break;
        case HcFlavor::hc1: w[i] = e2 * fit.n / (fit.n - 2.0); break;
        case HcFlavor::hc2: w[i] = e2 / omh; break;
        case HcFlavor::hc3: w[i] = e2 / (omh * omh); break;
      }
    }
    const CoefCovariance oracle = brute_force_sandwich(prices, w);
    const CoefCovariance lib = hc_covariance(prices, fit.residuals, fit.leverages, flavor);
    INFO("flavor " << to_string(flavor));
    REQUIRE_THAT(lib.var_intercept, WithinRel(oracle.var_intercept, 1e-9));
    REQUIRE_THAT(lib.var_slope, WithinRel(oracle.var_slope, 1e-9));
    REQUIRE_THAT(lib.covariance, WithinRel(oracle.covariance, 1e-9));
  }
  // Classical covariance through the same oracle with constant weights.
  const double s2 = fit.rss / (fit.n - 2);
  const CoefCovariance cl_oracle = brute_force_sandwich(prices, std::vector<double>(fit.n, s2));
  REQUIRE_THAT(fit.classical_cov.var_intercept, WithinRel(cl_oracle.var_intercept, 1e-9));
  REQUIRE_THAT(fit.classical_cov.var_slope, WithinRel(cl_oracle.var_slope, 1e-9));
}

TEST_CASE("HC variance ordering HC0 <= HC2 <= HC3 holds pointwise") {
  const double v0 = reference_fit(HcFlavor::hc0).robust_cov.var_slope;
  const double v2 = reference_fit(HcFlavor::hc2).robust_cov.var_slope;
  const double v3 = reference_fit(HcFlavor::hc3).robust_cov.var_slope;
  REQUIRE(v0 <= v2);
  REQUIRE(v2 <= v3);
}

TEST_CASE("flavor names round-trip and bad names are rejected") {
  for (HcFlavor f : {HcFlavor::hc0, HcFlavor::hc1, HcFlavor::hc2, HcFlavor::hc3}) {
    REQUIRE(parse_hc_flavor(to_string(f)) == f);  // accepts upper case
  }
  REQUIRE(parse_hc_flavor("hc1") == HcFlavor::hc1);
  REQUIRE_THROWS_AS(parse_hc_flavor("hc4"), ParseError);
  REQUIRE_THROWS_AS(parse_hc_flavor(""), ParseError);
}

TEST_CASE("exact-fit and flat-response degenerate samples") {
  // Perfectly collinear data: zero residuals, R^2 = 1, infinite Wald.
  const EstimationSample collinear = make_sample({{1.0, 10.0}, {2.0, 8.0}, {3.0, 6.0}});
  const OlsFit exact = fit_ols(collinear);
  REQUIRE_THAT(exact.slope, WithinAbs(-2.0, 1e-12));
  REQUIRE_THAT(exact.intercept, WithinAbs(12.0, 1e-12));
  REQUIRE(exact.r_squared == 1.0);
  REQUIRE(exact.se_slope == 0.0);
  REQUIRE(std::isinf(exact.f_stat));
  REQUIRE(exact.p_value == 0.0);
  REQUIRE_THROWS_AS(wald_f(exact), EstimationError);

  // Identical quantities: slope 0, R^2 defined as 0.
  const OlsFit flat = fit_ols(make_sample({{1.0, 5.0}, {2.0, 5.0}, {3.0, 5.0}}));
  REQUIRE(flat.slope == 0.0);
  REQUIRE(flat.r_squared == 0.0);
}

TEST_CASE("HC2/HC3 reject samples with leverage 1") {
  // Two points share a price, the third is alone: its leverage is exactly 1.
  const EstimationSample s = make_sample({{0.0, 1.0}, {0.0, 2.0}, {1.0, 3.0}});
  REQUIRE_NOTHROW(fit_ols(s, HcFlavor::hc0));
  REQUIRE_NOTHROW(fit_ols(s, HcFlavor::hc1));
  REQUIRE_THROWS_MATCHES(
      fit_ols(s, HcFlavor::hc2), EstimationError,
      Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("leverage")));
  REQUIRE_THROWS_AS(fit_ols(s, HcFlavor::hc3), EstimationError);
}

TEST_CASE("wald_f reproduces the F statistic and degrees of freedom") {
  const OlsFit fit = reference_fit(HcFlavor::hc3);
  const FTest t = wald_f(fit);
  REQUIRE_THAT(t.f, WithinRel(fit.f_stat, 1e-14));
  REQUIRE(t.df1 == 1);
  REQUIRE(t.df2 == 6);
}

TEST_CASE("randomized property suite: invariances of the fit") {
  std::mt19937_64 rng(20240817);
  std::uniform_int_distribution<int> n_dist(3, 50);
  std::uniform_real_distribution<double> price_dist(1.0, 40.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> coef_dist(-5.0, 5.0);

  for (int trial = 0; trial < 500; ++trial) {
    const int n = n_dist(rng);
    std::vector<PricePoint> pts(n);
    const double a = coef_dist(rng) * 100.0;
    const double b = coef_dist(rng);
    for (int i = 0; i < n; ++i) {
      pts[i].price = price_dist(rng);
      pts[i].quantity = a + b * pts[i].price + noise(rng) * 10.0;
    }
    // Ensure identification (price ties are fine, all-equal is not).
    pts[0].price = 1.0;
    pts[n - 1].price = 40.0;
    const EstimationSample sample = make_sample(pts);
    const OlsFit fit = fit_ols(sample, HcFlavor::hc1);

    INFO("trial " << trial << " n " << n);

    // Normal equations: residuals orthogonal to [1, p].
    double se_sum = 0.0, sep_sum = 0.0, scale = 0.0;
    for (int i = 0; i < n; ++i) {
      se_sum += fit.residuals[i];
      sep_sum += fit.residuals[i] * pts[i].price;
      scale += std::abs(pts[i].quantity) + 1.0;
    }
    REQUIRE_THAT(se_sum / scale, WithinAbs(0.0, 1e-9));
    REQUIRE_THAT(sep_sum / (scale * 40.0), WithinAbs(0.0, 1e-9));

    // Leverages sum to k = 2.
    double hsum = 0.0;
    for (double h : fit.leverages) hsum += h;
    REQUIRE_THAT(hsum, WithinAbs(2.0, 1e-10));

    // R^2 equals the squared correlation of price and quantity.
    double sp = 0.0, sq = 0.0;
    for (const PricePoint& pt : pts) {
      sp += pt.price;
      sq += pt.quantity;
    }
    sp /= n;
    sq /= n;
    double spp = 0.0, sqq = 0.0, spq = 0.0;
    for (const PricePoint& pt : pts) {
      spp += (pt.price - sp) * (pt.price - sp);
      sqq += (pt.quantity - sq) * (pt.quantity - sq);
      spq += (pt.price - sp) * (pt.quantity - sq);
    }
    if (sqq > 0.0) {
      REQUIRE_THAT(fit.r_squared, WithinAbs(spq * spq / (spp * sqq), 1e-9));
    }

    // Quantity scaling scales coefficients and SEs linearly.
    std::vector<PricePoint> scaled = pts;
    for (PricePoint& pt : scaled) pt.quantity *= 1000.0;
    const OlsFit fit_scaled = fit_ols(make_sample(scaled), HcFlavor::hc1);
    REQUIRE_THAT(fit_scaled.slope, WithinRel(fit.slope * 1000.0, 1e-9));
    REQUIRE_THAT(fit_scaled.intercept, WithinRel(fit.intercept * 1000.0, 1e-9));
    REQUIRE_THAT(fit_scaled.se_slope, WithinRel(fit.se_slope * 1000.0, 1e-9));
    REQUIRE_THAT(fit_scaled.r_squared, WithinAbs(fit.r_squared, 1e-12));
    if (std::isfinite(fit.f_stat)) {
      REQUIRE_THAT(fit_scaled.f_stat, WithinRel(fit.f_stat, 1e-9));
    }

    // Quantity shift moves only the intercept.
    std::vector<PricePoint> shifted = pts;
    for (PricePoint& pt : shifted) pt.quantity += 1e6;
    const OlsFit fit_shifted = fit_ols(make_sample(shifted), HcFlavor::hc1);
    REQUIRE_THAT(fit_shifted.slope, WithinAbs(fit.slope, std::abs(fit.slope) * 1e-6 + 1e-6));
    REQUIRE_THAT(fit_shifted.intercept, WithinRel(fit.intercept + 1e6, 1e-9));
  }
}
