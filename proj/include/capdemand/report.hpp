#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "capdemand/demand.hpp"
#include "capdemand/json_io.hpp"
#include "capdemand/market_data.hpp"
#include "capdemand/ols.hpp"
#include "capdemand/welfare.hpp"

namespace capdemand {

/// Fixed-point formatting, '.' separator, no locale. All report output is
/// built from this so that identical inputs give identical bytes.
inline std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

inline std::string format_millions(double cad, int decimals) {
  return format_fixed(cad / 1e6, decimals);
}

/// Truncates both coefficients down to the nearest 1000 CAD, i.e. to
/// 3-decimal millions. This is the rounding behind the published reference
/// figures (their slope in millions is cut, not rounded, at 3 decimals),
/// so welfare results computed from a truncated fitted curve reproduce
/// those digits exactly.
inline DemandCurve truncate_to_3dp_millions(const DemandCurve& curve) {
  return DemandCurve{std::floor(curve.a / 1000.0) * 1000.0,
                     std::floor(curve.b / 1000.0) * 1000.0, curve.base_year, curve.provenance};
}

inline std::string market_table_text(const MarketSeries& series) {
  std::ostringstream out;
  out << " year   fee/$100   nominal (Mil)   real " << series.base_year << " (Mil)\n";
  for (const MarketRecord& r : series.records) {
    char line[128];
    std::snprintf(line, sizeof line, " %4d   %8.2f   %13.1f   %15.1f", r.year, r.fee,
                  r.nominal_volume / 1e6, r.real_volume / 1e6);
    out << line;
    if (r.cap) out << "   (cap " << format_fixed(*r.cap, 2) << ")";
    out << '\n';
  }
  return out.str();
}

inline std::string fit_report_text(const OlsFit& fit) {
  std::ostringstream out;
  out << "DV: real loan volume (CAD/yr)\n";
  char line[160];
  std::snprintf(line, sizeof line, "  %-18s %16s %18s %18s\n", "", "coefficient",
                ("robust SE (" + std::string(to_string(fit.hc_flavor)) + ")").c_str(),
                "classical SE");
  out << line;
  std::snprintf(line, sizeof line, "  %-18s %16.2f %18.2f %18.2f\n", "borrowing cost",
                fit.slope, fit.se_slope, fit.se_slope_classical);
  out << line;
  std::snprintf(line, sizeof line, "  %-18s %16.2f %18.2f %18.2f\n", "constant", fit.intercept,
                fit.se_intercept, fit.se_intercept_classical);
  out << line;
  out << "  observations       " << fit.n << '\n';
  out << "  R-squared          " << format_fixed(fit.r_squared, 4) << '\n';
  out << "  F (robust Wald)    " << format_fixed(fit.f_stat, 4) << "   df (" << fit.df1 << ", "
      << fit.df2 << ")   Prob > F " << format_fixed(fit.p_value, 4) << '\n';
  out << "  F (classical)      " << format_fixed(fit.f_classical, 4) << "   df (" << fit.df1
      << ", " << fit.df2 << ")   Prob > F " << format_fixed(fit.p_value_classical, 4) << '\n';
  return out.str();
}

inline std::string fit_report_csv(const OlsFit& fit) {
  std::string out =
      "n,k,intercept,slope,se_intercept,se_slope,hc_flavor,r_squared,f_stat,df1,df2,p_value,"
      "se_intercept_classical,se_slope_classical,f_classical,p_value_classical\n";
  out += std::to_string(fit.n) + ',' + std::to_string(fit.k) + ',';
  out += detail::format_number(fit.intercept) + ',' + detail::format_number(fit.slope) + ',';
  out += detail::format_number(fit.se_intercept) + ',' + detail::format_number(fit.se_slope) + ',';
  out += std::string(to_string(fit.hc_flavor)) + ',';
  out += detail::format_number(fit.r_squared) + ',' + detail::format_number(fit.f_stat) + ',';
  out += std::to_string(fit.df1) + ',' + std::to_string(fit.df2) + ',';
  out += detail::format_number(fit.p_value) + ',';
  out += detail::format_number(fit.se_intercept_classical) + ',';
  out += detail::format_number(fit.se_slope_classical) + ',';
  out += detail::format_number(fit.f_classical) + ',';
  out += detail::format_number(fit.p_value_classical) + '\n';
  return out;
}

inline std::string welfare_table_text(const std::vector<WelfareResult>& results) {
  std::ostringstream out;
  out << "  scenario        p_from    p_to   Q(from) Mil   Q(to) Mil   dCS Mil/yr\n";
  for (const WelfareResult& r : results) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-14s %7.2f %7.2f %13.3f %11.3f %12.2f\n",
                  r.scenario.label.c_str(), r.scenario.p_from, r.scenario.p_to, r.q_from / 1e6,
                  r.q_to / 1e6, r.delta_cs / 1e6);
    out << line;
  }
  return out.str();
}

inline std::string welfare_csv(const std::vector<WelfareResult>& results) {
  std::string out = "label,p_from,p_to,q_from_cad,q_to_cad,delta_cs_cad,method\n";
  for (const WelfareResult& r : results) {
    out += r.scenario.label + ',';
    out += detail::format_number(r.scenario.p_from) + ',';
    out += detail::format_number(r.scenario.p_to) + ',';
    out += detail::format_number(r.q_from) + ',';
    out += detail::format_number(r.q_to) + ',';
    out += detail::format_number(r.delta_cs) + ',';
    out += std::string(to_string(r.method)) + '\n';
  }
  return out;
}

/// Plot-ready (price, quantity) series from p = 0 to the choke price.
inline std::string demand_points_csv(const DemandCurve& curve, int steps) {
  if (steps < 1) throw DomainError("demand_points_csv: steps must be positive");
  const double choke = choke_price(curve);
  std::string out = "price_per_100,quantity_cad\n";
  for (int i = 0; i <= steps; ++i) {
    const double p = i == steps ? choke : choke * i / steps;
    out += detail::format_number(p) + ',' + detail::format_number(quantity_at(curve, p)) + '\n';
  }
  return out;
}

/// Everything the plain-text summary and the report bundle need.
struct ReportContext {
  const MarketSeries* series = nullptr;  // null when the curve was specified
  const OlsFit* fit = nullptr;           // null when the curve was specified
  DemandCurve curve;                     // curve the welfare numbers used
  std::vector<WelfareResult> results;
  std::string input_desc;
  YearRange window;
  std::vector<int> excluded_years;
  std::string precision_desc;
  int demand_steps = 100;
};

inline std::string summary_text(const ReportContext& ctx) {
  std::ostringstream out;
  out << "Loan demand and cap welfare report\n";
  out << "==================================\n\n";
  out << "Input: " << ctx.input_desc;
  if (ctx.series) {
    out << " (" << ctx.series->records.size() << " annual records, "
        << ctx.series->records.front().year << "-" << ctx.series->records.back().year << ")";
  }
  out << "\n";
  out << "Estimation window: " << ctx.window.first << "-" << ctx.window.last
      << ", excluded years:";
  if (ctx.excluded_years.empty()) {
    out << " none";
  } else {
    for (int y : ctx.excluded_years) out << ' ' << y;
  }
  out << "\n";
  out << "Precision mode: " << ctx.precision_desc << "\n\n";

  if (ctx.series) {
    out << "Market data\n-----------\n" << market_table_text(*ctx.series) << '\n';
  }
  if (ctx.fit) {
    out << "Demand estimation\n-----------------\n" << fit_report_text(*ctx.fit) << '\n';
  }

  out << "Demand curve (" << to_string(ctx.curve.provenance) << ", " << ctx.precision_desc
      << ")\n";
  out << "  Q(p) = " << format_millions(ctx.curve.a, 3) << " Mil - "
      << format_millions(ctx.curve.b, 3) << " Mil * p\n";
  out << "  choke price: " << format_fixed(choke_price(ctx.curve), 3) << " per $100\n\n";

  if (!ctx.results.empty()) {
    out << "Consumer-surplus changes (per year, " << ctx.curve.base_year << " CAD)\n";
    out << "--------------------------------------------\n";
    for (const WelfareResult& r : ctx.results) {
      out << "  " << r.scenario.label << ": Q(" << format_fixed(r.scenario.p_from, 2) << ") = "
          << format_millions(r.q_from, 3) << " Mil -> Q(" << format_fixed(r.scenario.p_to, 2)
          << ") = " << format_millions(r.q_to, 3) << " Mil, dCS = "
          << format_millions(r.delta_cs, 2) << " Mil\n";
    }
  }
  return out.str();
}

/// Writes fit.json, welfare.json, demand_points.csv, and summary.txt into
/// `dir`, creating it if needed. Byte output depends only on the context.
inline void write_report_bundle(const std::filesystem::path& dir, const ReportContext& ctx) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
  const auto write_file = [&](const std::filesystem::path& name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary);
    out << content;
    if (!out) throw IoError("cannot write '" + (dir / name).string() + "'");
  };
  if (ctx.fit) {
    write_file("fit.json", fit_to_json(*ctx.fit).dump(2) + "\n");
  }
  nlohmann::json welfare{{"curve", curve_to_json(ctx.curve)},
                         {"results", welfare_results_to_json(ctx.results)}};
  write_file("welfare.json", welfare.dump(2) + "\n");
  write_file("demand_points.csv", demand_points_csv(ctx.curve, ctx.demand_steps));
  write_file("summary.txt", summary_text(ctx));
}

}  // namespace capdemand
