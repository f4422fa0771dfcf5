#include "gbbm/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gbbm/error.hpp"
#include "gbbm/parallel.hpp"

namespace gbbm {
namespace {

void check_run(const MeasureSpec& spec, const GbbmParams& p, const TransportRun& run) {
  spec.validate();
  if (spec.gamma != p.gamma() || spec.s != p.s() || spec.n_modes != p.n_modes())
    throw DomainError("transport: MeasureSpec and GbbmParams disagree on (gamma, s, N)");
  if (run.samples < 1000) throw DomainError("transport: at least 1000 samples required");
}

template <class Fn>
EstimateWithError monte_carlo(const MeasureSpec& spec, const TransportRun& run, Fn&& integrand) {
  std::vector<double> values(static_cast<std::size_t>(run.samples));
  parallel_for(
      values.size(),
      [&](std::size_t i) { values[i] = integrand(sample_mu_s(spec, sample_seed(run.seed, i))); },
      run.workers);
  return estimate_mean(values, run.seed);
}

}  // namespace

bool set_contains(const SetSpec& set, const SpectralField& u) {
  return std::visit(
      [&u](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SobolevBall>) {
          return std::isinf(s.radius) || sobolev_norm(u, s.sigma) <= s.radius;
        } else {
          const Complex c = u[s.mode];
          return (s.component == Component::re ? c.real() : c.imag()) <= s.threshold;
        }
      },
      set);
}

double radon_nikodym_weight(const SpectralField& u, const GbbmParams& p, double t, double dt) {
  if (t == 0.0) return 1.0;
  const SpectralField moved = flow_map(u, p, t, dt);
  return std::exp(truncated_energy(u, p) - truncated_energy(moved, p));
}

EstimateWithError plain_probability(const SetSpec& set, const MeasureSpec& spec, const TransportRun& run) {
  spec.validate();
  if (run.samples < 1000) throw DomainError("transport: at least 1000 samples required");
  return monte_carlo(spec, run, [&](const SpectralField& u) {
    return set_contains(set, u) && cutoff_chi_r(u, spec) == 1 ? 1.0 : 0.0;
  });
}

EstimateWithError transported_probability_direct(const SetSpec& set, const MeasureSpec& spec,
                                                 const GbbmParams& p, const TransportRun& run) {
  check_run(spec, p, run);
  return monte_carlo(spec, run, [&](const SpectralField& u) {
    if (cutoff_chi_r(u, spec) == 0) return 0.0;
    return set_contains(set, flow_map(u, p, -run.t, run.dt)) ? 1.0 : 0.0;
  });
}

EstimateWithError transported_probability_weighted(const SetSpec& set, const MeasureSpec& spec,
                                                   const GbbmParams& p, const TransportRun& run) {
  check_run(spec, p, run);
  return monte_carlo(spec, run, [&](const SpectralField& u) {
    if (cutoff_chi_r(u, spec) == 0 || !set_contains(set, u)) return 0.0;
    return radon_nikodym_weight(u, p, run.t, run.dt);
  });
}

double yudovich_bound(double m, double t, double C, double alpha) {
  if (!(m > 0.0 && m <= 1.0)) throw DomainError("yudovich_bound: m must lie in (0, 1]");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("yudovich_bound: alpha must lie in (0, 1]");
  if (!(C >= 0.0)) throw DomainError("yudovich_bound: C must be >= 0");
  if (!(t >= 0.0)) throw DomainError("yudovich_bound: t must be >= 0");
  return m * std::exp(C * std::numbers::e * t * std::pow(2.0 + std::log(1.0 / m), 1.0 - alpha));
}

HolderCheck holder_exponent_check(std::span<const double> m_values, double t, double C, double alpha,
                                  double delta) {
  if (m_values.empty()) throw DomainError("holder_exponent_check: empty grid");
  if (!(delta >= 0.0)) throw DomainError("holder_exponent_check: delta must be >= 0");
  const double amplitude = C * std::numbers::e * t;
  auto log_ratio = [&](double m) {
    // log(yudovich_bound(m) / m^{1-δ}) without forming either factor.
    yudovich_bound(m, t, C, alpha);  // domain checks
    const double k = std::log(1.0 / m);
    return amplitude * std::pow(2.0 + k, 1.0 - alpha) - delta * k;
  };

  HolderCheck out;
  if (amplitude == 0.0 || alpha == 1.0) {
    // f(k) = amplitude (2+k)^{1-α} - δk is nonincreasing: sup at k = 0.
    out.finite = true;
    out.log_c_tilde = amplitude * std::pow(2.0, 1.0 - alpha);
  } else if (delta > 0.0) {
    out.finite = true;
    const double log_stationary = std::log(amplitude * (1.0 - alpha) / delta) / alpha;  // log(2 + k*)
    if (log_stationary <= std::log(2.0)) {
      out.log_c_tilde = amplitude * std::pow(2.0, 1.0 - alpha);
    } else {
      // At k*, amplitude (2+k*)^{1-α} = δ(2+k*)/(1-α), so the sup equals
      // δ(2+k*) α/(1-α) + 2δ.
      out.log_c_tilde = delta * std::exp(log_stationary) * alpha / (1.0 - alpha) + 2.0 * delta;
    }
  }

  out.log_c_grid = -std::numeric_limits<double>::infinity();
  out.grid_verified = true;
  for (std::size_t i = 0; i < m_values.size(); ++i) {
    const double lr = log_ratio(m_values[i]);
    if (lr > out.log_c_grid) {
      out.log_c_grid = lr;
      out.grid_argmax = i;
    }
    if (!(lr <= out.log_c_tilde + 1e-12 * std::max(1.0, std::abs(out.log_c_tilde)))) out.grid_verified = false;
  }
  out.ok = out.finite && out.grid_verified;
  return out;
}

std::vector<double> singular_partial_sums(double gamma, int s, double t, std::span<const int> n_list,
                                          bool enforce_window) {
  if (enforce_window && !(gamma > 4.0 / 3.0 && gamma < 1.5)) {
    std::ostringstream msg;
    msg << "singular_partial_sums: gamma = " << gamma
        << " is outside (4/3, 3/2); for gamma > 3/2 the forced solution stays in H^{s+gamma/2}"
           " and the partial sums converge";
    throw DomainError(msg.str());
  }
  if (t == 0.0) throw DomainError("singular_partial_sums: t must be nonzero");
  if (n_list.empty()) throw DomainError("singular_partial_sums: empty N list");
  const int n_max = *std::max_element(n_list.begin(), n_list.end());
  if (*std::min_element(n_list.begin(), n_list.end()) < 1) throw DomainError("singular_partial_sums: N must be >= 1");

  const double alpha = s + 0.5 * gamma;
  std::vector<Complex> h(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) h[n - 1] = std::pow(n, -alpha);
  const SpectralField f = forced_linear_flow(SpectralField(std::move(h)), gamma, t);

  std::vector<double> cumulative(static_cast<std::size_t>(n_max));
  double sum = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    sum += std::pow(n, 2.0 * alpha) * std::norm(f[n]);
    cumulative[n - 1] = sum;
  }
  std::vector<double> out;
  for (int n : n_list) out.push_back(cumulative[n - 1]);
  return out;
}

std::vector<double> singular_witness_pairing(double gamma, int s, double t, std::span<const int> n_list) {
  if (n_list.empty()) throw DomainError("singular_witness_pairing: empty N list");
  const int n_max = *std::max_element(n_list.begin(), n_list.end());
  const double alpha = s + 0.5 * gamma;
  const double sign = t >= 0.0 ? 1.0 : -1.0;
  std::vector<Complex> h(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) h[n - 1] = std::pow(n, -alpha);
  const SpectralField f = forced_linear_flow(SpectralField(std::move(h)), gamma, t);

  std::vector<double> cumulative(static_cast<std::size_t>(n_max));
  double sum = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const Complex k_conj = Complex{0.0, sign * std::pow(n, gamma - 2.0 - alpha)};
    sum += std::pow(n, 2.0 * alpha) * (f[n] * k_conj).real();
    cumulative[n - 1] = sum;
  }
  std::vector<double> out;
  for (int n : n_list) out.push_back(cumulative[n - 1]);
  return out;
}

double increment_growth_exponent(std::span<const int> n_list, std::span<const double> sums) {
  if (n_list.size() != sums.size() || n_list.size() < 3)
    throw DomainError("increment_growth_exponent: need >= 3 paired points");
  std::vector<double> x, y;
  for (std::size_t k = 1; k < n_list.size(); ++k) {
    x.push_back(n_list[k]);
    y.push_back(sums[k] - sums[k - 1]);
  }
  return loglog_slope(x, y);
}

}  // namespace gbbm
