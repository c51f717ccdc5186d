#pragma once

#include <string_view>

#include "capdemand/market_data.hpp"

namespace capdemand {

/// British Columbia payday-loan market statistics, 2012-2023: average fee
/// per $100 borrowed (14-day term) and annual total loan volume, nominal
/// and in 2012 CAD. Mirrors data/bc_2012_2023.csv.
inline constexpr std::string_view kBcMarketCsv =
    "year,fee_per_100,nominal_volume_cad,real_volume_cad\n"
    "2012,21.50,318100000,318100000\n"
    "2013,21.70,351400000,344400000\n"
    "2014,21.90,385300000,370300000\n"
    "2015,21.70,340900000,321200000\n"
    "2016,21.70,369700000,341500000\n"
    "2017,19.30,397300000,359800000\n"
    "2018,16.82,416100000,369500000\n"
    "2019,15.30,441500000,384400000\n"
    "2020,14.92,390700000,333500000\n"
    "2021,14.69,271500000,227200000\n"
    "2022,14.85,305700000,250800000\n"
    "2023,14.92,327200000,263200000\n";

/// The compiled-in copy of the BC dataset, so golden tests run with no
/// filesystem dependency.
inline const MarketSeries& bc_market_fixture() {
  static const MarketSeries series = parse_market_csv(kBcMarketCsv);
  return series;
}

/// The estimation window used for the reference estimates (the 2020-2023
/// observations are confounded by pandemic-era income supports).
inline constexpr YearRange kReferenceWindow{2012, 2019};

}  // namespace capdemand
