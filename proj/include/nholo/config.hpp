// Problem configuration: a JSON document naming the input mode (a Lagrangian,
// d-metric blocks, or a full ansatz matrix), evaluation points, requested
// outputs, and tolerance overrides. Loading validates everything it can in
// one pass and throws ValidationError carrying the complete list of problems.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "nholo/dconn.hpp"
#include "nholo/dims.hpp"
#include "nholo/errors.hpp"

namespace nholo {

enum class ProblemMode { kLagrangian, kDMetric, kAnsatz };

std::string mode_name(ProblemMode mode);

struct GeodesicRequest {
  Eigen::VectorXd x0, y0;
  double tau_end = 1.0;
  int steps = 201;
};

// Command-line overrides applied to the document before validation.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> points;
  std::vector<std::pair<std::string, double>> tolerances;
};

struct ProblemConfig {
  Dims dims{1, 1};
  ProblemMode mode = ProblemMode::kDMetric;
  int order = 2;
  VvTermForm vv_middle_term = VvTermForm::kSymmetrized;

  std::string lagrangian_src;
  std::vector<std::vector<std::string>> g_src, h_src, n_src, ansatz_src;

  std::vector<Eigen::VectorXd> explicit_points;
  int sample_count = 0;
  Eigen::VectorXd box_lo, box_hi;  // empty unless a box was declared
  std::uint64_t seed = 12345;

  std::vector<std::string> outputs;
  std::map<std::string, double> tolerances;  // overrides; defaults elsewhere
  std::optional<GeodesicRequest> geodesic;
  std::optional<std::pair<double, double>> einstein_sources;  // lambda_h, _v

  std::string config_hash;  // FNV-1a of the canonical document
};

// Known output object names and which modes admit them.
const std::vector<std::string>& output_catalog();
bool output_needs_lagrangian(const std::string& name);

// Verification check names with their default tolerances.
const std::map<std::string, double>& default_tolerances();

std::uint64_t fnv1a64(const std::string& data);

ProblemConfig load_config(const std::string& path,
                          const ConfigOverrides& overrides = {});
ProblemConfig load_config_text(const std::string& text,
                               const ConfigOverrides& overrides = {});

}  // namespace nholo
