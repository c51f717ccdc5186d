#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "capdemand/errors.hpp"

namespace capdemand {

/// Base year for real (inflation-adjusted) dollars.
inline constexpr int kBaseYear = 2012;

/// One year's aggregate market observation.
struct MarketRecord {
  int year = 0;
  double fee = 0.0;             ///< CAD per $100 borrowed on a 14-day term.
  double nominal_volume = 0.0;  ///< annual total loan volume, nominal CAD
  double real_volume = 0.0;     ///< annual total loan volume, base-year CAD
  std::optional<double> cap;    ///< regulated maximum fee per $100, if known

  friend bool operator==(const MarketRecord&, const MarketRecord&) = default;
};

struct ValidationOptions {
  /// Reported average fees may exceed the nominal cap by this fraction
  /// (reporting cycles do not align with mid-year cap changes).
  double cap_tolerance = 0.05;
};

/// Annual observations ordered by year.
struct MarketSeries {
  std::vector<MarketRecord> records;
  int base_year = kBaseYear;
};

/// Inclusive calendar-year range.
struct YearRange {
  int first = 0;
  int last = 0;

  bool contains(int year) const { return year >= first && year <= last; }
  friend bool operator==(const YearRange&, const YearRange&) = default;
};

/// One (price, quantity) observation ready for regression.
struct PricePoint {
  double price = 0.0;     ///< CAD per $100 borrowed
  double quantity = 0.0;  ///< real CAD per year

  friend bool operator==(const PricePoint&, const PricePoint&) = default;
};

/// Validated regression input: at least 3 observations, prices not all
/// identical. Carries the provenance of the filtering that produced it.
struct EstimationSample {
  std::vector<PricePoint> pairs;
  YearRange window;
  std::vector<int> excluded_years;
};

inline void validate_record(const MarketRecord& r, const ValidationOptions& opts = {}) {
  if (!(r.fee > 0.0)) {
    throw ValidationError("year " + std::to_string(r.year) + ": fee must be positive");
  }
  if (!(r.nominal_volume > 0.0)) {
    throw ValidationError("year " + std::to_string(r.year) + ": nominal volume must be positive");
  }
  if (!(r.real_volume > 0.0)) {
    throw ValidationError("year " + std::to_string(r.year) + ": real volume must be positive");
  }
  if (r.cap && r.fee > *r.cap * (1.0 + opts.cap_tolerance)) {
    throw ValidationError("year " + std::to_string(r.year) + ": fee " + std::to_string(r.fee) +
                          " exceeds cap " + std::to_string(*r.cap) + " beyond tolerance");
  }
}

/// Builds a validated series: records sorted by year, duplicates rejected,
/// base-year nominal and real volumes required to agree.
inline MarketSeries make_series(std::vector<MarketRecord> records, int base_year = kBaseYear,
                                const ValidationOptions& opts = {}) {
  if (records.empty()) throw ValidationError("no records");
  std::sort(records.begin(), records.end(),
            [](const MarketRecord& a, const MarketRecord& b) { return a.year < b.year; });
  int prev_year = records.front().year - 1;
  for (const MarketRecord& r : records) {
    if (r.year == prev_year) {
      throw ValidationError("duplicate year " + std::to_string(r.year));
    }
    prev_year = r.year;
    validate_record(r, opts);
    if (r.year == base_year &&
        std::abs(r.nominal_volume - r.real_volume) > 1e-9 * r.nominal_volume) {
      throw ValidationError("base year " + std::to_string(base_year) +
                            ": nominal and real volumes must match");
    }
  }
  return MarketSeries{std::move(records), base_year};
}

/// Ratio of nominal to real volume; 1.0 exactly for the base year.
inline double implied_deflator(const MarketRecord& r) {
  if (!(r.real_volume > 0.0)) {
    throw DomainError("implied_deflator: real volume must be positive");
  }
  return r.nominal_volume / r.real_volume;
}

/// Converts a nominal amount to base-year dollars.
inline double deflate(double nominal, double deflator) {
  if (!(deflator > 0.0)) {
    throw DomainError("deflate: deflator must be positive");
  }
  return nominal / deflator;
}

/// Selects (fee, real volume) pairs inside `window` and not in `excluded`,
/// in year order. Throws EstimationError if the result cannot identify a
/// regression line.
inline EstimationSample filter_window(const MarketSeries& series, YearRange window,
                                      std::vector<int> excluded = {}) {
  if (window.first > window.last) {
    throw ValidationError("window " + std::to_string(window.first) + ":" +
                          std::to_string(window.last) + " is empty");
  }
  std::vector<PricePoint> pairs;
  for (const MarketRecord& r : series.records) {
    if (!window.contains(r.year)) continue;
    if (std::find(excluded.begin(), excluded.end(), r.year) != excluded.end()) continue;
    pairs.push_back(PricePoint{r.fee, r.real_volume});
  }
  if (pairs.size() < 3) {
    throw EstimationError("sample too small: " + std::to_string(pairs.size()) +
                          " observations in window (need at least 3)");
  }
  auto [lo, hi] = std::minmax_element(pairs.begin(), pairs.end(),
                                      [](auto& a, auto& b) { return a.price < b.price; });
  if (lo->price == hi->price) {
    throw EstimationError("all prices identical: slope unidentified");
  }
  return EstimationSample{std::move(pairs), window, std::move(excluded)};
}

/// Validates a hand-built sample (used when observations do not come from
/// a MarketSeries).
inline EstimationSample make_sample(std::vector<PricePoint> pairs, YearRange window = {},
                                    std::vector<int> excluded = {}) {
  if (pairs.size() < 3) {
    throw EstimationError("sample too small: " + std::to_string(pairs.size()) +
                          " observations (need at least 3)");
  }
  auto [lo, hi] = std::minmax_element(pairs.begin(), pairs.end(),
                                      [](auto& a, auto& b) { return a.price < b.price; });
  if (lo->price == hi->price) {
    throw EstimationError("all prices identical: slope unidentified");
  }
  return EstimationSample{std::move(pairs), window, std::move(excluded)};
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> cells;
  size_t start = 0;
  while (true) {
    size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

inline double parse_cell_double(std::string_view cell, int line_no, std::string_view what) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
    throw ParseError("line " + std::to_string(line_no) + ": bad " + std::string(what) + " '" +
                     std::string(cell) + "'");
  }
  return value;
}

inline int parse_cell_int(std::string_view cell, int line_no, std::string_view what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
    throw ParseError("line " + std::to_string(line_no) + ": bad " + std::string(what) + " '" +
                     std::string(cell) + "'");
  }
  return value;
}

/// Shortest fixed-point decimal that parses back to exactly `v`.
/// Integral magnitudes print with no decimal point.
inline std::string format_number(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f", v);
    return buf;
  }
  for (int prec = 1; prec <= 17; ++prec) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    double back = 0.0;
    auto [ptr, ec] = std::from_chars(buf, buf + std::char_traits<char>::length(buf), back);
    (void)ptr;
    if (ec == std::errc{} && back == v) return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline constexpr std::string_view kCsvHeader = "year,fee_per_100,nominal_volume_cad,real_volume_cad";
inline constexpr std::string_view kCsvHeaderWithCap =
    "year,fee_per_100,nominal_volume_cad,real_volume_cad,cap_per_100";

/// Parses the CSV interchange format. Header must match kCsvHeader, with
/// the cap column optional. Rows are normalized to ascending year.
inline MarketSeries parse_market_csv(std::istream& in, const ValidationOptions& opts = {}) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty input: missing header");
  std::string_view header = detail::trim(line);
  bool has_cap_column = false;
  if (header == kCsvHeaderWithCap) {
    has_cap_column = true;
  } else if (header != kCsvHeader) {
    throw ParseError("line 1: unexpected header '" + std::string(header) + "'");
  }

  std::vector<MarketRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = detail::trim(line);
    if (body.empty()) continue;
    auto cells = detail::split_csv_line(body);
    const size_t expected = has_cap_column ? 5 : 4;
    if (cells.size() != expected) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(expected) + " fields, got " + std::to_string(cells.size()));
    }
    MarketRecord r;
    r.year = detail::parse_cell_int(cells[0], line_no, "year");
    r.fee = detail::parse_cell_double(cells[1], line_no, "fee");
    r.nominal_volume = detail::parse_cell_double(cells[2], line_no, "nominal volume");
    r.real_volume = detail::parse_cell_double(cells[3], line_no, "real volume");
    if (has_cap_column && !cells[4].empty()) {
      r.cap = detail::parse_cell_double(cells[4], line_no, "cap");
    }
    try {
      validate_record(r, opts);
    } catch (const ValidationError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    records.push_back(r);
  }
  if (records.empty()) throw ParseError("no records");
  try {
    return make_series(std::move(records), kBaseYear, opts);
  } catch (const ValidationError& e) {
    throw ParseError(e.what());
  }
}

inline MarketSeries parse_market_csv(std::string_view text, const ValidationOptions& opts = {}) {
  std::istringstream in{std::string(text)};
  return parse_market_csv(in, opts);
}

/// Canonical CSV serialization; parse(serialize(s)) reproduces the records
/// field for field.
inline std::string serialize_market_csv(const MarketSeries& series) {
  const bool any_cap = std::any_of(series.records.begin(), series.records.end(),
                                   [](const MarketRecord& r) { return r.cap.has_value(); });
  std::string out{any_cap ? kCsvHeaderWithCap : kCsvHeader};
  out += '\n';
  for (const MarketRecord& r : series.records) {
    out += std::to_string(r.year);
    out += ',';
    out += detail::format_number(r.fee);
    out += ',';
    out += detail::format_number(r.nominal_volume);
    out += ',';
    out += detail::format_number(r.real_volume);
    if (any_cap) {
      out += ',';
      if (r.cap) out += detail::format_number(*r.cap);
    }
    out += '\n';
  }
  return out;
}

}  // namespace capdemand
