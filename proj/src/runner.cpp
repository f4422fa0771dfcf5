#include "gbbm/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gbbm/energy.hpp"
#include "gbbm/field_io.hpp"
#include "gbbm/flow.hpp"
#include "gbbm/measures.hpp"
#include "gbbm/stats.hpp"
#include "gbbm/trajectory_io.hpp"
#include "gbbm/transport.hpp"

namespace gbbm {
namespace {

using nlohmann::json;

constexpr double kDivergenceTolerance = 1e-8;

// Output of a single experiment before it is written.
struct Outcome {
  bool passed = false;
  json results;
  std::string csv_body;  // column header plus rows
};

GbbmParams params_of(const ExperimentConfig& c) { return {c.gamma, c.s, c.n_modes}; }
MeasureSpec spec_of(const ExperimentConfig& c) { return {c.s, c.gamma, c.n_modes, c.r}; }

SpectralField initial_field(const ExperimentConfig& c) {
  if (c.initial == "sample") return sample_mu_s(spec_of(c), sample_seed(c.seed, 0));
  if (c.initial == "smooth") {
    std::vector<Complex> coeffs(static_cast<std::size_t>(c.n_modes));
    for (int n = 1; n <= c.n_modes; ++n) coeffs[n - 1] = 0.5 * std::pow(n, -4.0);
    return SpectralField(std::move(coeffs));
  }
  SpectralField u = load_field(c.initial);
  if (u.support() > c.n_modes) throw DomainError("initial field has modes above n_modes");
  return u.resized(c.n_modes);
}

json estimate_json(const EstimateWithError& e) {
  return json{{"value", e.value}, {"std_error", e.std_error}, {"n_samples", e.n_samples}, {"master_seed", e.master_seed}};
}

std::string csv_row(std::initializer_list<double> values) {
  std::string row;
  for (double v : values) {
    if (!row.empty()) row += ',';
    row += format_double(v);
  }
  return row + '\n';
}

Outcome run_trajectory(const ExperimentConfig& c, bool conservation_table) {
  const double tol = c.effective_tolerance();
  const Trajectory traj = integrate(initial_field(c), params_of(c), c.t, c.dt, IntegrateOptions{tol});
  Outcome out;
  const double drift = traj.max_relative_drift();
  out.passed = drift < tol;
  out.results = {{"max_relative_drift", drift},
                 {"tolerance", tol},
                 {"steps", traj.size() - 1},
                 {"flagged", traj.flagged},
                 {"initial_state", field_to_json(traj.states.front())},
                 {"final_state", field_to_json(traj.final_state())}};
  std::ostringstream csv;
  if (conservation_table) {
    csv << "t,conserved,relative_drift\n";
    const double c0 = traj.conserved_log.front();
    const std::size_t last = traj.size() - 1;
    for (std::size_t k = 0; k <= last; ++k) {
      if (k % static_cast<std::size_t>(c.stride) != 0 && k != last) continue;
      const double q = traj.conserved_log[k];
      csv << csv_row({traj.times[k], q, c0 == 0.0 ? 0.0 : std::abs(q - c0) / std::abs(c0)});
    }
  } else {
    write_trajectory_csv(csv, traj, c.stride);
  }
  out.csv_body = csv.str();
  return out;
}

Outcome run_liouville(const ExperimentConfig& c) {
  const GbbmParams p = params_of(c);
  const SpectralField u0 = initial_field(c);
  const double det = jacobian_determinant(u0, p, c.t, c.dt);
  const double div0 = divergence_diagnostic(u0, p);
  const double div1 = divergence_diagnostic(flow_map(u0, p, c.t, c.dt), p);
  const double tol = c.effective_tolerance();
  Outcome out;
  out.passed = std::abs(det - 1.0) < tol && div0 < kDivergenceTolerance && div1 < kDivergenceTolerance;
  out.results = {{"jacobian_determinant", det},
                 {"determinant_error", std::abs(det - 1.0)},
                 {"divergence_initial", div0},
                 {"divergence_final", div1},
                 {"tolerance", tol},
                 {"divergence_tolerance", kDivergenceTolerance}};
  out.csv_body = "quantity,value\n";
  out.csv_body += "jacobian_determinant," + format_double(det) + "\n";
  out.csv_body += "divergence_initial," + format_double(div0) + "\n";
  out.csv_body += "divergence_final," + format_double(div1) + "\n";
  return out;
}

Outcome run_transport(const ExperimentConfig& c) {
  const GbbmParams p = params_of(c);
  const MeasureSpec spec = spec_of(c);
  const TransportRun tr{c.t, c.dt, c.samples, c.seed, c.workers};
  const EstimateWithError plain = plain_probability(c.set, spec, tr);
  const EstimateWithError direct = transported_probability_direct(c.set, spec, p, tr);
  const EstimateWithError weighted = transported_probability_weighted(c.set, spec, p, tr);

  // E[w] = 1 under the uncut measure.
  MeasureSpec uncut = spec;
  uncut.r = std::numeric_limits<double>::infinity();
  const EstimateWithError weight =
      transported_probability_weighted(SobolevBall{0.0, std::numeric_limits<double>::infinity()}, uncut, p, tr);
  const EstimateWithError one{1.0, 0.0, weight.n_samples, weight.master_seed};

  const double tol = c.effective_tolerance();
  const double z = combined_z(direct, weighted);
  const double z_weight = combined_z(weight, one);
  Outcome out;
  out.passed = z <= tol && z_weight <= tol;
  out.results = {{"plain", estimate_json(plain)},
                 {"direct", estimate_json(direct)},
                 {"weighted", estimate_json(weighted)},
                 {"weight_mean", estimate_json(weight)},
                 {"z_direct_weighted", z},
                 {"z_weight_mean", z_weight},
                 {"tolerance", tol}};
  std::ostringstream csv;
  csv << "estimator,value,std_error,n_samples\n";
  auto row = [&csv](const char* name, const EstimateWithError& e) {
    csv << name << ',' << format_double(e.value) << ',' << format_double(e.std_error) << ',' << e.n_samples << '\n';
  };
  row("plain", plain);
  row("direct", direct);
  row("weighted", weighted);
  row("weight_mean", weight);
  out.csv_body = csv.str();
  return out;
}

Outcome run_energy(const ExperimentConfig& c) {
  const GbbmParams p = params_of(c);
  const MeasureSpec spec = spec_of(c);
  const EnergyBoundParams b = EnergyBoundParams::from_interpolation(c.s, c.gamma, c.eps, c.eps1, c.kappa);
  const std::uint64_t verify_seed = c.seed + 1;
  const EnergyFit fit = fit_energy_constant(spec, p, b, c.seed, verify_seed, static_cast<std::size_t>(c.samples),
                                            c.safety, c.workers);

  const SpectralField probe = sample_mu_s(spec, sample_seed(verify_seed, 0));
  const EnergySplit split = energy_derivative_decomposed(probe, p, c.oversample);
  const double ibp = ibp_identity_residual(probe, c.s, 8);
  const double tol = c.effective_tolerance();
  const double spectral = energy_derivative_spectral(probe, p);
  const bool split_ok = split.residual <= tol * std::max(1.0, std::abs(spectral));

  Outcome out;
  out.passed = fit.violations == 0 && split_ok;
  out.results = {{"theta", b.theta},
                 {"theta_sum", b.theta_sum()},
                 {"derived_kappa", b.derived_kappa()},
                 {"kappa", b.kappa},
                 {"c_fit", fit.c_fit},
                 {"calibration_max_ratio", fit.calibration_max_ratio},
                 {"safety", c.safety},
                 {"verify_min_margin", fit.verify_min_margin},
                 {"violations", fit.violations},
                 {"split", {{"i1", split.i1}, {"i2", split.i2}, {"spectral", spectral}, {"residual", split.residual}}},
                 {"ibp_residual", ibp},
                 {"tolerance", tol}};
  std::ostringstream csv;
  csv << "sample_id,lhs,rhs,ratio\n";
  for (const EnergySampleRow& row : fit.verify_rows)
    csv << row.index << ',' << format_double(row.lhs) << ',' << format_double(row.rhs) << ','
        << format_double(row.ratio) << '\n';
  out.csv_body = csv.str();
  return out;
}

Outcome run_large_deviation(const ExperimentConfig& c) {
  const std::vector<LpNormPoint> scan =
      large_deviation_scan(spec_of(c), c.eps, c.p_list, c.samples, c.seed, c.workers);
  std::vector<double> ps, norms;
  for (const LpNormPoint& pt : scan) {
    ps.push_back(pt.p);
    norms.push_back(pt.norm);
  }
  const double slope = loglog_slope(ps, norms);
  const double tol = c.effective_tolerance();
  Outcome out;
  out.passed = slope <= tol;
  out.results = {{"p", ps}, {"lp_norm", norms}, {"slope", slope}, {"max_slope", tol}};
  out.csv_body = "p,lp_norm\n";
  for (const LpNormPoint& pt : scan) out.csv_body += csv_row({pt.p, pt.norm});
  return out;
}

Outcome run_singular(const ExperimentConfig& c) {
  const std::vector<double> sums = singular_partial_sums(c.gamma, c.s, c.t, c.n_list);
  const std::vector<double> witness = singular_witness_pairing(c.gamma, c.s, c.t, c.n_list);
  const double exponent = increment_growth_exponent(c.n_list, sums);
  const double expected = 3.0 - 2.0 * c.gamma;
  const double tol = c.effective_tolerance();
  Outcome out;
  out.passed = std::abs(exponent - expected) <= tol;
  out.results = {{"n_list", c.n_list},
                 {"partial_sums", sums},
                 {"witness_pairing", witness},
                 {"growth_exponent", exponent},
                 {"expected_exponent", expected},
                 {"tolerance", tol}};
  out.csv_body = "N,partial_sum,witness_pairing\n";
  for (std::size_t i = 0; i < sums.size(); ++i)
    out.csv_body += std::to_string(c.n_list[i]) + ',' + format_double(sums[i]) + ',' + format_double(witness[i]) + '\n';
  return out;
}

Outcome run_dk(const ExperimentConfig& c) {
  const std::vector<int> dims = c.effective_basis_dims();
  const DkPartialSums sums = dk_partial_sums(initial_field(c), params_of(c), c.t, dims, c.dt, c.workers);
  std::vector<double> increments;
  for (std::size_t i = 0; i < sums.hs_squared.size(); ++i)
    increments.push_back(sums.hs_squared[i] - (i == 0 ? 0.0 : sums.hs_squared[i - 1]));
  std::vector<double> ratios;
  for (std::size_t i = 2; i < increments.size(); ++i)
    ratios.push_back(increments[i - 1] == 0.0 ? 0.0 : increments[i] / increments[i - 1]);
  Outcome out;
  out.passed = std::all_of(sums.hs_squared.begin(), sums.hs_squared.end(), [](double x) { return std::isfinite(x); });
  out.results = {{"basis_dims", dims},
                 {"hs_squared", sums.hs_squared},
                 {"hs_norm", sums.hs_norm},
                 {"increments", increments},
                 {"increment_ratios", ratios}};
  out.csv_body = "basis_dim,hs_squared,hs_norm\n";
  for (std::size_t i = 0; i < dims.size(); ++i)
    out.csv_body +=
        std::to_string(dims[i]) + ',' + format_double(sums.hs_squared[i]) + ',' + format_double(sums.hs_norm[i]) + '\n';
  return out;
}

Outcome dispatch(const ExperimentConfig& c) {
  switch (c.experiment) {
    case Experiment::simulate: return run_trajectory(c, false);
    case Experiment::conservation: return run_trajectory(c, true);
    case Experiment::liouville: return run_liouville(c);
    case Experiment::transport: return run_transport(c);
    case Experiment::energy: return run_energy(c);
    case Experiment::large_deviation: return run_large_deviation(c);
    case Experiment::singular_demo: return run_singular(c);
    case Experiment::dk_diagnostic: return run_dk(c);
  }
  throw DomainError("unknown experiment");
}

void write_atomically(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".partial";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot write " + tmp.string());
    os << content;
    if (!os) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

const char* tool_version() { return GBBM_VERSION; }

json ReportBundle::summary() const {
  return json{{"experiment", std::string(experiment_name(experiment))},
              {"config_hash", config_hash},
              {"status", passed ? "pass" : "fail"},
              {"files", files},
              {"wall_seconds", wall_seconds},
              {"results", results}};
}

std::string resolve_out_dir(const ExperimentConfig& config) {
  if (!config.out_dir.empty()) return config.out_dir;
  if (const char* env = std::getenv("GBBM_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return "gbbm_out";
}

ReportBundle run(const ExperimentConfig& config) {
  if (std::vector<std::string> diagnostics = validate(config); !diagnostics.empty())
    throw ValidationError(std::move(diagnostics));

  const auto start = std::chrono::steady_clock::now();
  const Outcome outcome = dispatch(config);

  ReportBundle bundle;
  bundle.experiment = config.experiment;
  bundle.config_hash = config.hash();
  bundle.passed = outcome.passed;
  bundle.results = outcome.results;

  const std::string name(experiment_name(config.experiment));
  const std::filesystem::path dir = resolve_out_dir(config);
  std::filesystem::create_directories(dir);

  const json header{{"tool", kToolName}, {"version", tool_version()}, {"config_hash", bundle.config_hash}};
  const json doc{{"header", header},
                 {"config", config.canonical_json()},
                 {"status", outcome.passed ? "pass" : "fail"},
                 {"results", outcome.results}};
  std::ostringstream csv;
  csv << "# tool: " << kToolName << ' ' << tool_version() << '\n'
      << "# config_hash: " << bundle.config_hash << '\n'
      << "# experiment: " << name << '\n'
      << "# status: " << (outcome.passed ? "pass" : "fail") << '\n'
      << outcome.csv_body;

  const std::filesystem::path json_path = dir / (name + ".json");
  const std::filesystem::path csv_path = dir / (name + ".csv");
  write_atomically(json_path, doc.dump(2) + "\n");
  write_atomically(csv_path, csv.str());
  bundle.files = {json_path.string(), csv_path.string()};
  bundle.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return bundle;
}

}  // namespace gbbm
