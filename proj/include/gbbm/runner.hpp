#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gbbm/config.hpp"

namespace gbbm {

inline constexpr const char* kToolName = "gbbm";
const char* tool_version();

/// Outcome of one experiment. Everything except wall_seconds is also written
/// to disk; timing is kept out of the files so reruns are byte-identical.
struct ReportBundle {
  Experiment experiment = Experiment::simulate;
  std::string config_hash;
  bool passed = false;
  nlohmann::json results;
  std::vector<std::string> files;
  double wall_seconds = 0.0;

  nlohmann::json summary() const;
};

/// config.out_dir, else $GBBM_OUT_DIR, else "gbbm_out".
std::string resolve_out_dir(const ExperimentConfig& config);

/// Validates, runs the experiment and writes <out_dir>/<experiment>.json and
/// .csv. Throws ValidationError before any work when the config is invalid.
/// Files are written only after the computation succeeds.
ReportBundle run(const ExperimentConfig& config);

}  // namespace gbbm
