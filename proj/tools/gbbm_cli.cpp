#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "gbbm/config.hpp"
#include "gbbm/runner.hpp"
#include "gbbm/toml_lite.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInvalid = 2;

struct Overrides {
  std::string config_path;
  std::optional<double> gamma, t, dt;
  std::optional<int> s, n_modes;
  std::optional<std::int64_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<unsigned> workers;
  bool validate_only = false;

  nlohmann::json as_json() const {
    nlohmann::json j = nlohmann::json::object();
    if (gamma) j["gamma"] = *gamma;
    if (s) j["s"] = *s;
    if (n_modes) j["n_modes"] = *n_modes;
    if (dt) j["dt"] = *dt;
    if (t) j["t"] = *t;
    if (samples) j["samples"] = *samples;
    if (seed) j["seed"] = *seed;
    if (out_dir) j["out_dir"] = *out_dir;
    if (workers) j["workers"] = *workers;
    return j;
  }
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config_path, "TOML config file")->check(CLI::ExistingFile);
  cmd->add_option("--gamma", o.gamma, "dispersion exponent");
  cmd->add_option("--s", o.s, "Sobolev index of the Gaussian measure");
  cmd->add_option("--n-modes", o.n_modes, "Galerkin cutoff N");
  cmd->add_option("--dt", o.dt, "RK4 step");
  cmd->add_option("--t", o.t, "final time");
  cmd->add_option("--samples", o.samples, "Monte Carlo sample count");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--out-dir", o.out_dir, "output directory (default $GBBM_OUT_DIR or ./gbbm_out)");
  cmd->add_option("--workers", o.workers, "worker threads (0 = hardware concurrency)");
  cmd->add_flag("--validate-only", o.validate_only, "print diagnostics and exit");
}

// Applies file values, then the subcommand's experiment, then flags.
gbbm::ExperimentConfig build_config(const Overrides& o, std::optional<gbbm::Experiment> experiment) {
  gbbm::ExperimentConfig config;
  if (!o.config_path.empty()) config = gbbm::ExperimentConfig::from_json(gbbm::parse_toml_file(o.config_path));
  if (experiment) config.experiment = *experiment;
  return config.merged(o.as_json());
}

int execute(const Overrides& o, std::optional<gbbm::Experiment> experiment) {
  gbbm::ExperimentConfig config;
  try {
    config = build_config(o, experiment);
  } catch (const gbbm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  const std::vector<std::string> diagnostics = gbbm::validate(config);
  for (const std::string& d : diagnostics) std::cerr << "invalid: " << d << '\n';
  if (!diagnostics.empty()) return kExitInvalid;
  if (o.validate_only) {
    std::cout << config.to_json().dump(2) << '\n';
    return kExitPass;
  }
  try {
    const gbbm::ReportBundle report = gbbm::run(config);
    std::cout << report.summary().dump(2) << '\n';
    return report.passed ? kExitPass : kExitFail;
  } catch (const gbbm::DomainError& e) {
    std::cerr << "invalid: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Galerkin gBBM experiments: flows, Gaussian measures and their transport"};
  app.set_version_flag("--version", std::string(gbbm::tool_version()));
  app.require_subcommand(1);

  int exit_code = kExitPass;
  Overrides run_opts;
  CLI::App* run_cmd = app.add_subcommand("run", "run the experiment named in the config file");
  add_common(run_cmd, run_opts);
  run_cmd->callback([&] { exit_code = execute(run_opts, std::nullopt); });

  std::vector<Overrides> per(gbbm::all_experiments().size());
  for (std::size_t i = 0; i < per.size(); ++i) {
    const gbbm::Experiment e = gbbm::all_experiments()[i];
    CLI::App* cmd = app.add_subcommand(std::string(gbbm::experiment_name(e)), "run the " +
                                                                                  std::string(gbbm::experiment_name(e)) +
                                                                                  " experiment");
    add_common(cmd, per[i]);
    cmd->callback([&, i, e] { exit_code = execute(per[i], e); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitInvalid;
  }
  return exit_code;
}
