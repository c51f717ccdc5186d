#pragma once

// Umbrella header: linear inverse-demand estimation and consumer-surplus
// analysis for price-capped credit markets.

#include "capdemand/cli.hpp"
#include "capdemand/demand.hpp"
#include "capdemand/distributions.hpp"
#include "capdemand/errors.hpp"
#include "capdemand/fixture.hpp"
#include "capdemand/json_io.hpp"
#include "capdemand/market_data.hpp"
#include "capdemand/ols.hpp"
#include "capdemand/report.hpp"
#include "capdemand/welfare.hpp"
