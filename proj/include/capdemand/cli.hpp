#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "capdemand/fixture.hpp"
#include "capdemand/json_io.hpp"
#include "capdemand/report.hpp"

namespace capdemand {

enum class OutputFormat { table, json, csv };
enum class PrecisionMode { paper_rounded, full };

inline std::string_view to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::table: return "table";
    case OutputFormat::json: return "json";
    case OutputFormat::csv: return "csv";
  }
  return "?";
}

inline std::string_view to_string(PrecisionMode m) {
  return m == PrecisionMode::paper_rounded ? "paper_rounded" : "full";
}

/// Everything a command run needs. Defaults reproduce the reference
/// estimates on the builtin dataset.
struct RunConfig {
  std::string input_path = "builtin";
  YearRange window{2012, 2019};
  std::vector<int> excluded_years;
  HcFlavor hc_flavor = kDefaultHcFlavor;
  std::vector<Scenario> scenarios;
  std::string scenario_file;
  std::optional<double> a_override;  // raw CAD
  std::optional<double> b_override;  // raw CAD per $ of fee
  OutputFormat output_format = OutputFormat::table;
  PrecisionMode precision_mode = PrecisionMode::paper_rounded;
  std::string out_dir = "report";
  int demand_steps = 100;
};

// ---------------------------------------------------------------------------
// Flag-value parsing

inline YearRange parse_window(std::string_view text) {
  const size_t colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ParseError("window '" + std::string(text) + "': expected Y1:Y2");
  }
  const auto piece = [&](std::string_view cell) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
      throw ParseError("window '" + std::string(text) + "': bad year '" + std::string(cell) +
                       "'");
    }
    return v;
  };
  YearRange range{piece(text.substr(0, colon)), piece(text.substr(colon + 1))};
  if (range.first > range.last) {
    throw ParseError("window '" + std::string(text) + "': first year after last");
  }
  return range;
}

inline Scenario parse_scenario(std::string_view text) {
  const size_t colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ParseError("scenario '" + std::string(text) + "': expected P1:P2");
  }
  const auto piece = [&](std::string_view cell) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
      throw ParseError("scenario '" + std::string(text) + "': bad price '" + std::string(cell) +
                       "'");
    }
    return v;
  };
  const std::string from(text.substr(0, colon));
  const std::string to(text.substr(colon + 1));
  return Scenario{from + "->" + to, piece(from), piece(to)};
}

inline std::vector<int> parse_excluded_years(std::string_view text) {
  std::vector<int> years;
  size_t start = 0;
  while (start <= text.size()) {
    size_t comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view cell = text.substr(start, comma - start);
    int v = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
      throw ParseError("excluded years: bad year '" + std::string(cell) + "'");
    }
    years.push_back(v);
    start = comma + 1;
    if (comma == text.size()) break;
  }
  return years;
}

inline OutputFormat parse_output_format(std::string_view text) {
  if (text == "table") return OutputFormat::table;
  if (text == "json") return OutputFormat::json;
  if (text == "csv") return OutputFormat::csv;
  throw ParseError("unknown format '" + std::string(text) + "' (expected table|json|csv)");
}

inline PrecisionMode parse_precision_mode(std::string_view text) {
  if (text == "paper_rounded") return PrecisionMode::paper_rounded;
  if (text == "full") return PrecisionMode::full;
  throw ParseError("unknown precision '" + std::string(text) +
                   "' (expected paper_rounded|full)");
}

// ---------------------------------------------------------------------------
// Command bodies. Exit codes: 0 ok, 2 input/parse, 3 estimation,
// 4 scenario, 5 unwritable output directory. Machine output goes to `out`,
// diagnostics to `diag`.

namespace detail {

inline MarketSeries load_series(const RunConfig& config) {
  if (config.input_path == "builtin") return bc_market_fixture();
  std::ifstream in(config.input_path);
  if (!in) throw IoError("cannot open input '" + config.input_path + "'");
  return parse_market_csv(in);
}

inline std::vector<Scenario> gather_scenarios(const RunConfig& config) {
  std::vector<Scenario> scenarios;
  if (!config.scenario_file.empty()) {
    std::ifstream in(config.scenario_file);
    if (!in) throw IoError("cannot open scenario file '" + config.scenario_file + "'");
    std::ostringstream text;
    text << in.rdbuf();
    scenarios = scenarios_from_json(text.str());
  }
  scenarios.insert(scenarios.end(), config.scenarios.begin(), config.scenarios.end());
  return scenarios;
}

struct ResolvedCurve {
  DemandCurve curve;
  std::optional<OlsFit> fit;        // absent when --a/--b were given
  std::optional<MarketSeries> series;
};

/// The demand curve a command operates on: either the --a/--b override or
/// a fit on the filtered input, truncated in paper_rounded mode.
inline ResolvedCurve resolve_curve(const RunConfig& config) {
  if (config.a_override || config.b_override) {
    if (!config.a_override || !config.b_override) {
      throw ParseError("--a and --b must be given together");
    }
    return ResolvedCurve{DemandCurve::specified(*config.a_override, *config.b_override), {}, {}};
  }
  MarketSeries series = load_series(config);
  OlsFit fit = fit_ols(filter_window(series, config.window, config.excluded_years),
                       config.hc_flavor);
  DemandCurve curve = from_fit(fit);
  if (config.precision_mode == PrecisionMode::paper_rounded) {
    curve = truncate_to_3dp_millions(curve);
  }
  return ResolvedCurve{curve, std::move(fit), std::move(series)};
}

inline void warn_above_choke(const DemandCurve& curve, const std::vector<Scenario>& scenarios,
                             std::ostream& diag) {
  const double choke = choke_price(curve);
  for (const Scenario& s : scenarios) {
    for (double p : {s.p_from, s.p_to}) {
      if (p > choke) {
        diag << "warning: scenario '" << s.label << "': price " << format_fixed(p, 2)
             << " is above the choke price " << format_fixed(choke, 3)
             << "; quantity clamped to 0\n";
      }
    }
  }
}

template <typename Body>
int run_mapped(std::ostream& diag, Body&& body) {
  try {
    return body();
  } catch (const ScenarioError& e) {
    diag << "error: " << e.what() << '\n';
    return 4;
  } catch (const EstimationError& e) {
    diag << "error: " << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    diag << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    diag << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace detail

inline int run_fit(const RunConfig& config, std::ostream& out, std::ostream& diag) {
  return detail::run_mapped(diag, [&] {
    const MarketSeries series = detail::load_series(config);
    const EstimationSample sample = filter_window(series, config.window, config.excluded_years);
    const OlsFit fit = fit_ols(sample, config.hc_flavor);
    switch (config.output_format) {
      case OutputFormat::table:
        out << "Demand estimation: quantity on price, " << config.window.first << "-"
            << config.window.last << " (N=" << fit.n << ")\n";
        out << fit_report_text(fit);
        break;
      case OutputFormat::json:
        out << fit_to_json(fit).dump(2) << '\n';
        break;
      case OutputFormat::csv:
        out << fit_report_csv(fit);
        break;
    }
    return 0;
  });
}

inline int run_welfare(const RunConfig& config, std::ostream& out, std::ostream& diag) {
  return detail::run_mapped(diag, [&] {
    const std::vector<Scenario> scenarios = detail::gather_scenarios(config);
    if (scenarios.empty()) throw ScenarioError("no scenarios given (use --scenario P1:P2)");
    const DemandCurve curve = detail::resolve_curve(config).curve;
    detail::warn_above_choke(curve, scenarios, diag);
    const std::vector<WelfareResult> results = run_scenarios(curve, scenarios);
    switch (config.output_format) {
      case OutputFormat::table:
        out << "Demand curve (" << to_string(curve.provenance) << ", "
            << to_string(config.precision_mode) << "): Q(p) = " << format_millions(curve.a, 3)
            << " Mil - " << format_millions(curve.b, 3) << " Mil * p\n";
        out << welfare_table_text(results);
        break;
      case OutputFormat::json: {
        nlohmann::json doc{{"curve", curve_to_json(curve)},
                           {"results", welfare_results_to_json(results)}};
        out << doc.dump(2) << '\n';
        break;
      }
      case OutputFormat::csv:
        out << welfare_csv(results);
        break;
    }
    return 0;
  });
}

inline int run_report(const RunConfig& config, std::ostream& out, std::ostream& diag) {
  (void)out;
  return detail::run_mapped(diag, [&] {
    const detail::ResolvedCurve resolved = detail::resolve_curve(config);

    std::vector<Scenario> scenarios = detail::gather_scenarios(config);
    if (scenarios.empty()) {
      scenarios = {Scenario{"23->15", 23.0, 15.0}, Scenario{"15->14", 15.0, 14.0}};
    }
    detail::warn_above_choke(resolved.curve, scenarios, diag);

    ReportContext ctx;
    ctx.series = resolved.series ? &*resolved.series : nullptr;
    ctx.fit = resolved.fit ? &*resolved.fit : nullptr;
    ctx.curve = resolved.curve;
    ctx.results = run_scenarios(resolved.curve, scenarios);
    ctx.input_desc = config.input_path;
    ctx.window = config.window;
    ctx.excluded_years = config.excluded_years;
    ctx.precision_desc = std::string(to_string(config.precision_mode));
    ctx.demand_steps = config.demand_steps;

    try {
      write_report_bundle(config.out_dir, ctx);
    } catch (const IoError& e) {
      diag << "error: " << e.what() << '\n';
      return 5;
    }
    diag << "report written to " << config.out_dir << '\n';
    return 0;
  });
}

}  // namespace capdemand
