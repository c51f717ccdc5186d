// End-to-end library walkthrough on the bundled BC dataset: fit the demand
// line on 2012-2019, adopt it as a demand curve, and price two historical
// cap reductions.

#include <iostream>

#include "capdemand/capdemand.hpp"

int main() {
  using namespace capdemand;

  const MarketSeries& series = bc_market_fixture();
  const EstimationSample sample = filter_window(series, kReferenceWindow);
  const OlsFit fit = fit_ols(sample);

  std::cout << "Fit on " << fit.n << " observations:\n" << fit_report_text(fit) << '\n';

  // Truncated coefficients reproduce the reference welfare digits.
  const DemandCurve curve = truncate_to_3dp_millions(from_fit(fit));
  std::cout << "Curve: Q(p) = " << format_millions(curve.a, 3) << " Mil - "
            << format_millions(curve.b, 3) << " Mil * p   (choke "
            << format_fixed(choke_price(curve), 3) << ")\n\n";

  const std::vector<Scenario> scenarios = {{"23->15", 23.0, 15.0}, {"15->14", 15.0, 14.0}};
  for (const WelfareResult& r : run_scenarios(curve, scenarios)) {
    std::cout << r.scenario.label << ": dCS = " << format_millions(r.delta_cs, 2)
              << " Mil/yr\n";
  }
  return 0;
}
