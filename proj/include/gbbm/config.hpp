#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gbbm/error.hpp"
#include "gbbm/transport.hpp"

namespace gbbm {

enum class Experiment {
  simulate,
  conservation,
  liouville,
  transport,
  energy,
  large_deviation,
  singular_demo,
  dk_diagnostic,
};

/// CLI spelling, e.g. "large-deviation".
std::string_view experiment_name(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);
const std::vector<Experiment>& all_experiments();

/// Everything a run depends on. A run is a pure function of this record;
/// out_dir and workers change where and how fast, never what is written.
struct ExperimentConfig {
  Experiment experiment = Experiment::simulate;
  double gamma = 2.0;
  int s = 1;
  int n_modes = 64;
  double t = 1.0;
  double dt = 1e-3;
  std::int64_t samples = 1000;
  std::uint64_t seed = 0;
  double r = std::numeric_limits<double>::infinity();

  // energy and large deviation
  double eps = 0.01;
  double eps1 = 0.01;
  double kappa = 1.9;
  double safety = 2.0;
  int oversample = 4;
  std::vector<double> p_list{2, 4, 8, 16, 32, 64};

  // singular demo
  std::vector<int> n_list{64, 128, 256, 512, 1024, 2048, 4096, 8192, 16384};

  // dk diagnostic; empty means 1, 2, 4, ... up to n_modes
  std::vector<int> basis_dims;

  // transport
  SetSpec set = SobolevBall{1.0, 1.0};

  /// "sample" (a μ_s draw), "smooth" (û(n) = n^{-4}/2) or a field file path.
  std::string initial = "sample";
  int stride = 1;
  /// Overrides the experiment's default pass threshold.
  std::optional<double> tolerance;

  std::string out_dir;
  unsigned workers = 0;

  double effective_tolerance() const;
  std::vector<int> effective_basis_dims() const;

  nlohmann::json to_json() const;
  /// Fields that determine the output: to_json without out_dir and workers.
  nlohmann::json canonical_json() const;
  /// 16 hex digits of FNV-1a over canonical_json().dump().
  std::string hash() const;

  /// Missing keys keep their defaults. Unknown keys and type mismatches
  /// throw ConfigError.
  static ExperimentConfig from_json(const nlohmann::json& j);
  /// Applies the keys of `overrides` on top of this config.
  ExperimentConfig merged(const nlohmann::json& overrides) const;
};

/// Every violated precondition, one message per offending field. Empty when
/// the config can run.
std::vector<std::string> validate(const ExperimentConfig& config);

/// Carries the diagnostics of a config that failed validation.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> diagnostics);
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

nlohmann::json set_to_json(const SetSpec& set);
SetSpec set_from_json(const nlohmann::json& j);

}  // namespace gbbm
