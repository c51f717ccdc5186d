#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "capdemand/demand.hpp"
#include "capdemand/errors.hpp"
#include "capdemand/ols.hpp"
#include "capdemand/welfare.hpp"

namespace capdemand {

inline nlohmann::json fit_to_json(const OlsFit& fit) {
  return nlohmann::json{
      {"n", fit.n},
      {"k", fit.k},
      {"intercept", fit.intercept},
      {"slope", fit.slope},
      {"se_intercept", fit.se_intercept},
      {"se_slope", fit.se_slope},
      {"hc_flavor", std::string(to_string(fit.hc_flavor))},
      {"r_squared", fit.r_squared},
      {"f_stat", fit.f_stat},
      {"df1", fit.df1},
      {"df2", fit.df2},
      {"p_value", fit.p_value},
      {"classical",
       {{"se_intercept", fit.se_intercept_classical},
        {"se_slope", fit.se_slope_classical},
        {"f_stat", fit.f_classical},
        {"p_value", fit.p_value_classical}}},
  };
}

inline nlohmann::json curve_to_json(const DemandCurve& curve) {
  return nlohmann::json{
      {"a_cad_per_year", curve.a},
      {"b_cad_per_year_per_dollar", curve.b},
      {"base_year", curve.base_year},
      {"provenance", std::string(to_string(curve.provenance))},
  };
}

inline nlohmann::json scenarios_to_json(const std::vector<Scenario>& scenarios) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Scenario& s : scenarios) {
    arr.push_back({{"label", s.label}, {"p_from", s.p_from}, {"p_to", s.p_to}});
  }
  return arr;
}

/// Parses a scenario file: a JSON array of {label, p_from, p_to}.
inline std::vector<Scenario> scenarios_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("scenario file: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("scenario file: expected a JSON array");
  std::vector<Scenario> scenarios;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("label") || !item.contains("p_from") ||
        !item.contains("p_to")) {
      throw ParseError("scenario file: each entry needs label, p_from, p_to");
    }
    try {
      scenarios.push_back(Scenario{item.at("label").get<std::string>(),
                                   item.at("p_from").get<double>(),
                                   item.at("p_to").get<double>()});
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("scenario file: ") + e.what());
    }
  }
  return scenarios;
}

inline nlohmann::json welfare_results_to_json(const std::vector<WelfareResult>& results) {
  nlohmann::json arr = nlohmann::json::array();
  for (const WelfareResult& r : results) {
    arr.push_back({
        {"label", r.scenario.label},
        {"p_from", r.scenario.p_from},
        {"p_to", r.scenario.p_to},
        {"q_from_cad", r.q_from},
        {"q_to_cad", r.q_to},
        {"delta_cs_cad", r.delta_cs},
        {"method", std::string(to_string(r.method))},
    });
  }
  return arr;
}

}  // namespace capdemand
