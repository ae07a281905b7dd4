// Command-line front end: loads a JSON problem configuration, dispatches to
// the compute / verify / geodesic runners, and writes the JSON report to
// stdout or --out. Exit codes: 0 success, 1 usage or configuration error,
// 2 verification failure, 3 numeric or domain error.
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nholo/config.hpp"
#include "nholo/errors.hpp"
#include "nholo/runner.hpp"

namespace {

bool parse_tolerance(const std::string& arg, std::string& name,
                     double& value) {
  std::size_t eq = arg.find('=');
  if (eq == std::string::npos || eq == 0) return false;
  name = arg.substr(0, eq);
  const std::string tail = arg.substr(eq + 1);
  char* end = nullptr;
  value = std::strtod(tail.c_str(), &end);
  return end && *end == '\0' && !tail.empty();
}

int write_report(const std::string& out_path, const std::string& report) {
  if (out_path.empty()) {
    std::cout << report;
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write report to '" << out_path << "'\n";
    return 1;
  }
  out << report;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numeric engine for N-anholonomic geometry"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::uint64_t seed = 0;
  int points = 0;
  std::vector<std::string> tol_args;

  for (const char* name : {"compute", "verify", "geodesic"}) {
    CLI::App* sub = app.add_subcommand(
        name, std::string(name) + " using a problem configuration");
    sub->add_option("config", config_path, "JSON configuration file")
        ->required();
    sub->add_option("--out", out_path, "report file (default: stdout)");
    sub->add_option("--seed", seed, "override the sampling seed");
    sub->add_option("--points", points, "override the sample count")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tol", tol_args,
                    "override a check tolerance, name=value (repeatable)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  nholo::ConfigOverrides overrides;
  if (sub->count("--seed")) overrides.seed = seed;
  if (sub->count("--points")) overrides.points = points;
  for (const std::string& arg : tol_args) {
    std::string name;
    double value = 0.0;
    if (!parse_tolerance(arg, name, value)) {
      std::cerr << "invalid --tol argument '" << arg
                << "', expected name=value\n";
      return 1;
    }
    overrides.tolerances.emplace_back(name, value);
  }

  try {
    nholo::ProblemConfig cfg = nholo::load_config(config_path, overrides);
    nholo::RunResult result;
    if (sub->get_name() == "compute") result = nholo::run_compute(cfg);
    else if (sub->get_name() == "verify") result = nholo::run_verify(cfg);
    else result = nholo::run_geodesic(cfg);
    int write_rc = write_report(out_path, result.report);
    return write_rc != 0 ? write_rc : result.exit_code;
  } catch (const nholo::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const nholo::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const nholo::DegenerateMetricError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const nholo::DomainError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
