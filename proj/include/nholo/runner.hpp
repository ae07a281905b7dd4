// Orchestration over point sets: evaluate requested objects (compute), run
// the named verification suite (verify), or integrate a geodesic request
// (geodesic). Each entry point returns the serialized JSON report plus the
// process exit code the CLI should use: 0 success, 2 verification failure,
// 3 numeric or domain error. Configuration problems throw ValidationError
// and map to exit code 1 in the CLI.
#pragma once

#include <string>

#include "nholo/config.hpp"

namespace nholo {

struct RunResult {
  std::string report;
  int exit_code = 0;
};

RunResult run_compute(const ProblemConfig& cfg);
RunResult run_verify(const ProblemConfig& cfg);
RunResult run_geodesic(const ProblemConfig& cfg);

}  // namespace nholo
