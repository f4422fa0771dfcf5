#include "gbbm/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "gbbm/error.hpp"
#include "gbbm/parallel.hpp"
#include "gbbm/stats.hpp"

namespace gbbm {
namespace {

double grid_mean_of_product(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> prod(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) prod[j] = a[j] * b[j];
  return pairwise_sum(prod) / static_cast<double>(a.size());
}

bool is_integer(double x) { return x == std::floor(x); }

SpectralField derivative_of_order(const SpectralField& u, double sigma) {
  return is_integer(sigma) ? derivative(u, static_cast<int>(sigma)) : fractional_derivative(u, sigma);
}

SpectralField projected(const SpectralField& u, int cutoff) {
  return u.n_max() > cutoff ? u.resized(cutoff) : u;
}

void check_pair(const MeasureSpec& spec, const GbbmParams& p) {
  spec.validate();
  if (spec.gamma != p.gamma() || spec.s != p.s() || spec.n_modes != p.n_modes())
    throw DomainError("energy: MeasureSpec and GbbmParams disagree on (gamma, s, N)");
}

}  // namespace

double interpolation_top(int s, double gamma, double eps) { return s + 0.5 * gamma - 0.5 - eps; }

double interpolation_theta(double sigma, int s, double gamma, double eps, double eps1) {
  const double top = interpolation_top(s, gamma, eps);
  if (!(top > 0.5 * gamma)) throw DomainError("interpolation_theta: need s - 1/2 - eps > 0");
  return (top - sigma - eps1) / (top - 0.5 * gamma);
}

double cubic_interpolation_theta(double gamma, double eps) {
  if (!(gamma > 4.0 / 3.0)) throw DomainError("cubic_interpolation_theta: requires gamma > 4/3");
  if (!(eps > 0.0 && eps < 0.5)) throw DomainError("cubic_interpolation_theta: eps must lie in (0, 1/2)");
  const double sigma = (5.0 - gamma + 8.0 * eps) / 4.0;
  double theta = 2.0 / 3.0;
  if (sigma > 0.5 * gamma) {
    const double alpha = (0.5 + 0.5 * gamma - eps - sigma) / (0.5 - eps);
    theta = 2.0 * alpha / 3.0;
  }
  if (!(theta > 1.0 / 3.0)) {
    std::ostringstream msg;
    msg << "cubic_interpolation_theta: theta = " << theta << " <= 1/3; need gamma > 4/3 + 10 eps/3";
    throw DomainError(msg.str());
  }
  return theta;
}

EnergyBoundParams EnergyBoundParams::from_interpolation(int s, double gamma, double eps, double eps1,
                                                        double kappa) {
  EnergyBoundParams b;
  b.kappa = kappa;
  b.eps = eps;
  b.eps1 = eps1;
  if (s == 1) {
    b.theta.assign(3, cubic_interpolation_theta(gamma, eps));
  } else if (s >= 2) {
    b.theta = {interpolation_theta(s, s, gamma, eps, eps1), interpolation_theta(s, s, gamma, eps, eps1),
               interpolation_theta(1, s, gamma, eps, eps1)};
  } else {
    throw DomainError("EnergyBoundParams: s must be >= 1");
  }
  b.validate();
  return b;
}

double EnergyBoundParams::theta_sum() const { return std::accumulate(theta.begin(), theta.end(), 0.0); }

void EnergyBoundParams::validate() const {
  if (!(kappa >= 1.0 && kappa < 2.0)) throw DomainError("EnergyBoundParams: kappa must lie in [1, 2)");
  if (!(eps > 0.0) || !(eps1 > 0.0)) throw DomainError("EnergyBoundParams: eps and eps1 must be positive");
  if (!(c_fit > 0.0)) throw DomainError("EnergyBoundParams: C_fit must be positive");
  for (double t : theta)
    if (!(t > 0.0 && t < 1.0)) throw DomainError("EnergyBoundParams: every theta must lie in (0, 1)");
  if (!theta.empty()) {
    const double sum = theta_sum();
    if (!(sum > 1.0 && sum <= 2.0)) {
      std::ostringstream msg;
      msg << "EnergyBoundParams: sum of theta = " << sum << " must lie in (1, 2]";
      throw DomainError(msg.str());
    }
  }
}

double energy_derivative_spectral(const SpectralField& u, const GbbmParams& p) {
  const SpectralField r = gbbm_rhs(u, p);
  const double weight = 2.0 * p.energy_index();
  double sum = 0.0;
  for (int n = 1; n <= p.n_modes(); ++n) sum += std::pow(n, weight) * (std::conj(u[n]) * r[n]).real();
  return 2.0 * sum;
}

EnergySplit energy_derivative_decomposed(const SpectralField& u, const GbbmParams& p, int oversample) {
  if (oversample < 1) throw DomainError("energy_derivative_decomposed: oversample must be >= 1");
  const int n = p.n_modes();
  const int s = p.s();
  const SpectralField v = projected(u, n).resized(n);
  const int grid = 2 * oversample * n;

  std::vector<double> vv = synthesize(v, grid);
  for (double& x : vv) x *= x;
  const SpectralField square = analyze(vv, std::min(2 * n, (grid - 1) / 2));
  const SpectralField dsquare = derivative(square, 1);

  SpectralField damped = fractional_derivative(v, s);
  std::vector<Complex> c(damped.coeffs().begin(), damped.coeffs().end());
  for (int k = 1; k <= n; ++k) c[k - 1] /= 1.0 + std::pow(k, p.gamma());
  damped = SpectralField(std::move(c));

  EnergySplit out;
  out.i1 = -grid_mean_of_product(synthesize(derivative(v, s), grid), synthesize(derivative(dsquare, s), grid));
  out.i2 = grid_mean_of_product(synthesize(damped, grid), synthesize(fractional_derivative(dsquare, s), grid));
  const double spectral = energy_derivative_spectral(v, p);
  out.residual = std::abs(out.i1 + out.i2 - spectral);
  out.resolved = out.residual <= 1e-9 * std::max(1.0, std::abs(spectral));
  return out;
}

double ibp_identity_residual(const SpectralField& v, int s, int oversample) {
  if (s < 1) throw DomainError("ibp_identity_residual: s must be >= 1");
  if (oversample < 2) throw DomainError("ibp_identity_residual: oversample must be >= 2");
  const int grid = 2 * oversample * v.n_max();
  const std::vector<double> a = synthesize(derivative(v, s), grid);
  const std::vector<double> da = synthesize(derivative(v, s + 1), grid);
  const std::vector<double> w = synthesize(v, grid);
  const std::vector<double> dw = synthesize(derivative(v, 1), grid);
  std::vector<double> lhs(grid), rhs(grid);
  for (int j = 0; j < grid; ++j) {
    lhs[j] = a[j] * da[j] * w[j];
    rhs[j] = -0.5 * dw[j] * a[j] * a[j];
  }
  const double dx = 2.0 * std::numbers::pi / grid;
  return std::abs(pairwise_sum(lhs) - pairwise_sum(rhs)) * dx;
}

double energy_bound_rhs(const SpectralField& u, const GbbmParams& p, const EnergyBoundParams& b) {
  const SpectralField v = projected(u, p.n_modes());
  const double low = sobolev_norm(v, 0.5 * p.gamma());
  const double high =
      sup_norm(fractional_derivative(v, interpolation_top(p.s(), p.gamma(), b.eps)), kNormOversample);
  return b.c_fit * (1.0 + std::pow(low, 3.0 - b.kappa)) * (1.0 + std::pow(high, b.kappa));
}

double interpolation_slack(double sigma, double theta, int s, double gamma, double eps) {
  return theta * 0.5 * gamma + (1.0 - theta) * interpolation_top(s, gamma, eps) - sigma;
}

double lp_interpolation_ratio(const SpectralField& u, double sigma, double theta, const GbbmParams& p,
                              double eps) {
  if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("lp_interpolation_ratio: theta must lie in (0, 1]");
  const double slack = interpolation_slack(sigma, theta, p.s(), p.gamma(), eps);
  if (!(slack > 0.0 || (theta == 1.0 && slack == 0.0))) {
    std::ostringstream msg;
    msg << "lp_interpolation_ratio: sigma < theta gamma/2 + (1-theta)(s+gamma/2-1/2-eps) fails, slack = "
        << slack;
    throw DomainError(msg.str());
  }
  const SpectralField v = projected(u, p.n_modes());
  if (v.is_zero()) return 0.0;
  const double lhs = lebesgue_norm(derivative_of_order(v, sigma), 2.0 / theta, kNormOversample);
  const double low = l2_norm(fractional_derivative(v, 0.5 * p.gamma()));
  if (theta == 1.0) return lhs / low;
  const double high =
      sup_norm(fractional_derivative(v, interpolation_top(p.s(), p.gamma(), eps)), kNormOversample);
  return lhs / (std::pow(low, theta) * std::pow(high, 1.0 - theta));
}

double lp_cubic_check(const SpectralField& u, double gamma, double eps) {
  const double theta = cubic_interpolation_theta(gamma, eps);
  if (u.is_zero()) return 0.0;
  const double lhs = lebesgue_norm(derivative(u, 1), 3.0, kNormOversample);
  const double low = l2_norm(fractional_derivative(u, 0.5 * gamma));
  const double high = sup_norm(fractional_derivative(u, 0.5 + 0.5 * gamma - eps), kNormOversample);
  return lhs / (std::pow(low, theta) * std::pow(high, 1.0 - theta));
}

std::vector<LpNormPoint> large_deviation_scan(const MeasureSpec& spec, double eps, const std::vector<double>& p_list,
                                              std::int64_t samples, std::uint64_t seed, unsigned workers) {
  spec.validate();
  if (samples < 10000) throw DomainError("large_deviation_scan: at least 10^4 samples required");
  if (p_list.empty()) throw DomainError("large_deviation_scan: empty p list");
  for (double p : p_list)
    if (!(p >= 2.0 && p <= 128.0)) throw DomainError("large_deviation_scan: p must lie in [2, 128]");
  const double top = interpolation_top(spec.s, spec.gamma, eps);

  std::vector<double> x(static_cast<std::size_t>(samples));
  parallel_for(
      x.size(),
      [&](std::size_t i) {
        x[i] = sup_norm(fractional_derivative(sample_mu_s(spec, sample_seed(seed, i)), top), kNormOversample);
      },
      workers);

  const double xmax = *std::max_element(x.begin(), x.end());
  std::vector<LpNormPoint> out;
  std::vector<double> scaled(x.size());
  for (double p : p_list) {
    if (xmax == 0.0) {
      out.push_back({p, 0.0});
      continue;
    }
    for (std::size_t i = 0; i < x.size(); ++i) scaled[i] = std::pow(x[i] / xmax, p);
    out.push_back({p, xmax * std::pow(pairwise_sum(scaled) / static_cast<double>(x.size()), 1.0 / p)});
  }
  return out;
}

std::vector<EnergySampleRow> energy_ensemble(const MeasureSpec& spec, const GbbmParams& p,
                                             const EnergyBoundParams& b, std::uint64_t seed, std::size_t count,
                                             unsigned workers) {
  check_pair(spec, p);
  std::vector<EnergySampleRow> rows(count);
  parallel_for(
      count,
      [&](std::size_t i) {
        const SpectralField u = sample_mu_s(spec, sample_seed(seed, i));
        EnergySampleRow& row = rows[i];
        row.index = i;
        row.lhs = std::abs(energy_derivative_spectral(u, p));
        row.rhs = energy_bound_rhs(u, p, b);
        row.ratio = row.lhs / row.rhs;
      },
      workers);
  return rows;
}

EnergyFit fit_energy_constant(const MeasureSpec& spec, const GbbmParams& p, EnergyBoundParams b,
                              std::uint64_t calibration_seed, std::uint64_t verify_seed, std::size_t count,
                              double safety, unsigned workers) {
  if (calibration_seed == verify_seed) throw DomainError("fit_energy_constant: ensembles must use distinct seeds");
  if (!(safety >= 1.0)) throw DomainError("fit_energy_constant: safety factor must be >= 1");
  if (count == 0) throw DomainError("fit_energy_constant: empty ensemble");
  b.c_fit = 1.0;
  EnergyFit fit;
  for (const EnergySampleRow& row : energy_ensemble(spec, p, b, calibration_seed, count, workers))
    fit.calibration_max_ratio = std::max(fit.calibration_max_ratio, row.ratio);
  fit.c_fit = safety * fit.calibration_max_ratio;
  if (!(fit.c_fit > 0.0)) throw DomainError("fit_energy_constant: calibration ensemble has zero derivative");
  b.c_fit = fit.c_fit;
  fit.verify_rows = energy_ensemble(spec, p, b, verify_seed, count, workers);
  fit.verify_min_margin = std::numeric_limits<double>::infinity();
  for (const EnergySampleRow& row : fit.verify_rows) {
    if (row.lhs > row.rhs) ++fit.violations;
    if (row.lhs > 0.0) fit.verify_min_margin = std::min(fit.verify_min_margin, row.rhs / row.lhs);
  }
  return fit;
}

double ensemble_max(const MeasureSpec& spec, std::uint64_t seed, std::size_t count,
                    const std::function<double(const SpectralField&)>& ratio, unsigned workers) {
  spec.validate();
  std::vector<double> values(count);
  parallel_for(
      count, [&](std::size_t i) { values[i] = ratio(sample_mu_s(spec, sample_seed(seed, i))); }, workers);
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

}  // namespace gbbm
