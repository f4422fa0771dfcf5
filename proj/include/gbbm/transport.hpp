#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <variant>
#include <vector>

#include "gbbm/flow.hpp"
#include "gbbm/measures.hpp"
#include "gbbm/stats.hpp"

namespace gbbm {

/// {u : ‖u‖_{H^σ} <= radius}; radius may be +∞.
struct SobolevBall {
  double sigma = 1.0;
  double radius = std::numeric_limits<double>::infinity();
};

enum class Component { re, im };

/// {u : Re û(n) <= threshold} or {u : Im û(n) <= threshold}.
struct HalfSpace {
  int mode = 1;
  Component component = Component::re;
  double threshold = 0.0;
};

using SetSpec = std::variant<SobolevBall, HalfSpace>;

bool set_contains(const SetSpec& set, const SpectralField& u);

/// exp(‖π_N u‖²_{H^{s+γ/2}} - ‖π_N Φ_N(t)u‖²_{H^{s+γ/2}}): the density at u
/// of the truncated Gaussian pulled back through Φ_N(t), relative to itself.
double radon_nikodym_weight(const SpectralField& u, const GbbmParams& p, double t, double dt);

struct TransportRun {
  double t = 0.0;
  double dt = 1e-2;
  std::int64_t samples = 1000;
  std::uint64_t seed = 0;
  unsigned workers = 0;
};

/// μ_{s,r}(A) by plain Monte Carlo: mean of 1_A(u) χ_r(u).
EstimateWithError plain_probability(const SetSpec& set, const MeasureSpec& spec, const TransportRun& run);

/// μ_{s,r}(Φ_N(t)A) as the mean of 1_A(Φ_N(-t)u) χ_r(u), u ~ μ_s.
EstimateWithError transported_probability_direct(const SetSpec& set, const MeasureSpec& spec,
                                                 const GbbmParams& p, const TransportRun& run);

/// μ_{s,r}(Φ_N(t)A) as the mean of 1_A(u) χ_r(u) w(u, t), u ~ μ_s.
EstimateWithError transported_probability_weighted(const SetSpec& set, const MeasureSpec& spec,
                                                   const GbbmParams& p, const TransportRun& run);

/// m exp(C e t (2 + log(1/m))^{1-α}).
double yudovich_bound(double m, double t, double C, double alpha);

struct HolderCheck {
  /// A finite C̃ with yudovich_bound(m) <= C̃ m^{1-δ} for all m in (0,1].
  bool finite = false;
  /// log C̃, the supremum over m in (0,1] of log(yudovich_bound(m) / m^{1-δ}).
  double log_c_tilde = std::numeric_limits<double>::infinity();
  /// Largest log ratio over the supplied grid.
  double log_c_grid = 0.0;
  std::size_t grid_argmax = 0;
  /// Every grid point satisfies the bound with the supremum constant.
  bool grid_verified = false;
  /// ok = finite && grid_verified.
  bool ok = false;
};

/// Checks the Hölder-type bound on m_values. With k = log(1/m) the log ratio
/// C e t (2+k)^{1-α} - δk is concave in k, so its supremum is found at the
/// stationary point and is finite exactly when δ > 0 or α = 1. Work is in
/// log space, because C̃ itself overflows a double for small α.
HolderCheck holder_exponent_check(std::span<const double> m_values, double t, double C, double alpha,
                                  double delta);

/// ‖π_N f(t)‖²_{H^{s+γ/2}} for f the forced linear flow with
/// ĥ(n) = n^{-(s+γ/2)}, for each N in n_list. Rejects γ outside (4/3, 3/2)
/// unless enforce_window is false.
std::vector<double> singular_partial_sums(double gamma, int s, double t, std::span<const int> n_list,
                                          bool enforce_window = true);

/// Partial sums of Re Σ n^{2(s+γ/2)} f̂(n) conj(k̂(n)) against the witness
/// k̂(n) = -i sgn(t) n^{γ-2-(s+γ/2)}, which lies in H^{s+γ/2} for γ < 3/2 and
/// pairs divergently (like log N) with f(t).
std::vector<double> singular_witness_pairing(double gamma, int s, double t, std::span<const int> n_list);

/// Growth exponent of partial sums S(N): least-squares slope of
/// log(S(N_{k+1}) - S(N_k)) against log N_{k+1} over consecutive list entries.
/// For S(N) ≈ a + b N^q on a geometric grid this slope is q, where fitting
/// log S directly is biased by the constant a.
double increment_growth_exponent(std::span<const int> n_list, std::span<const double> sums);

}  // namespace gbbm
