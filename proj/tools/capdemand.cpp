// capdemand: estimate a linear demand curve for a price-capped credit
// market from annual aggregates and compute consumer-surplus changes for
// cap-change scenarios.
//
// Commands:
//   fit      estimate the demand line and report coefficients + inference
//   welfare  consumer-surplus change for each --scenario P1:P2
//   report   write fit.json, welfare.json, demand_points.csv, summary.txt
//
// Exit codes: 0 ok, 2 input/parse error, 3 estimation error,
//             4 scenario error, 5 unwritable output directory.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "capdemand/capdemand.hpp"

namespace {

struct RawOptions {
  std::string input = "builtin";
  std::string window = "2012:2019";
  std::string exclude;
  std::string hc = "hc3";
  std::vector<std::string> scenarios;
  std::string scenario_file;
  double a = 0.0;
  double b = 0.0;
  bool has_a = false;
  bool has_b = false;
  std::string precision = "paper_rounded";
  std::string format = "table";
  std::string out_dir = "report";
  int steps = 100;
};

void add_common_flags(CLI::App& cmd, RawOptions& raw) {
  cmd.add_option("--input", raw.input, "Input CSV path, or 'builtin' for the bundled dataset");
  cmd.add_option("--window", raw.window, "Estimation window, inclusive (Y1:Y2)");
  cmd.add_option("--exclude", raw.exclude, "Years to drop from the window (Y[,Y...])");
  cmd.add_option("--hc", raw.hc, "Robust covariance flavor (hc0|hc1|hc2|hc3)");
  cmd.add_option("--precision", raw.precision,
                 "paper_rounded truncates fitted coefficients to 3-decimal millions before "
                 "welfare math; full keeps them as estimated");
  cmd.add_option("--format", raw.format, "Output format (table|json|csv)");
}

void add_scenario_flags(CLI::App& cmd, RawOptions& raw) {
  cmd.add_option("--scenario", raw.scenarios, "Cap change P1:P2 (repeatable)");
  cmd.add_option("--scenarios", raw.scenario_file,
                 "JSON file with an array of {label, p_from, p_to}");
  auto* a_opt = cmd.add_option("--a", raw.a, "Demand intercept override, raw CAD/yr");
  auto* b_opt = cmd.add_option("--b", raw.b, "Demand slope magnitude override, raw CAD/yr per $");
  a_opt->needs(b_opt);
  b_opt->needs(a_opt);
}

capdemand::RunConfig build_config(const RawOptions& raw, const CLI::App& cmd) {
  capdemand::RunConfig config;
  config.input_path = raw.input;
  config.window = capdemand::parse_window(raw.window);
  if (!raw.exclude.empty()) config.excluded_years = capdemand::parse_excluded_years(raw.exclude);
  config.hc_flavor = capdemand::parse_hc_flavor(raw.hc);
  for (const std::string& s : raw.scenarios) {
    config.scenarios.push_back(capdemand::parse_scenario(s));
  }
  config.scenario_file = raw.scenario_file;
  const CLI::Option* a_opt = cmd.get_option_no_throw("--a");
  const CLI::Option* b_opt = cmd.get_option_no_throw("--b");
  if (a_opt && a_opt->count() > 0) config.a_override = raw.a;
  if (b_opt && b_opt->count() > 0) config.b_override = raw.b;
  config.precision_mode = capdemand::parse_precision_mode(raw.precision);
  config.output_format = capdemand::parse_output_format(raw.format);
  config.out_dir = raw.out_dir;
  config.demand_steps = raw.steps;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear demand estimation and cap-change welfare analysis"};
  app.require_subcommand(1);

  RawOptions fit_raw, welfare_raw, report_raw;

  CLI::App* fit_cmd = app.add_subcommand("fit", "Estimate the demand line");
  add_common_flags(*fit_cmd, fit_raw);

  CLI::App* welfare_cmd =
      app.add_subcommand("welfare", "Consumer-surplus change for cap scenarios");
  add_common_flags(*welfare_cmd, welfare_raw);
  add_scenario_flags(*welfare_cmd, welfare_raw);

  CLI::App* report_cmd = app.add_subcommand("report", "Write the full report bundle");
  add_common_flags(*report_cmd, report_raw);
  add_scenario_flags(*report_cmd, report_raw);
  report_cmd->add_option("--out", report_raw.out_dir, "Output directory");
  report_cmd->add_option("--steps", report_raw.steps, "Demand-point grid steps")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (fit_cmd->parsed()) {
      return capdemand::run_fit(build_config(fit_raw, *fit_cmd), std::cout, std::cerr);
    }
    if (welfare_cmd->parsed()) {
      return capdemand::run_welfare(build_config(welfare_raw, *welfare_cmd), std::cout,
                                    std::cerr);
    }
    return capdemand::run_report(build_config(report_raw, *report_cmd), std::cout, std::cerr);
  } catch (const capdemand::Error& e) {
    // config parsing (window/scenario/flavor values)
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
