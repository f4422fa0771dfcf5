#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "gbbm/flow.hpp"
#include "gbbm/measures.hpp"

namespace gbbm {

/// Constants of the bound
///   |d/dt ‖π_N u‖²_{H^{s+γ/2}}| <= C (1 + ‖π_N u‖_{H^{γ/2}}^{3-κ}) (1 + ‖|D_x|^{s+γ/2-1/2-ε} π_N u‖_{L^∞}^κ).
struct EnergyBoundParams {
  double kappa = 1.9;
  double eps = 0.01;
  double eps1 = 0.01;
  /// Interpolation exponents θ_j with p_j = 2/θ_j.
  std::vector<double> theta;
  double c_fit = 1.0;

  /// θ_j for the cubic term ∫(∂^s v)(∂^{σ1} v)(∂^{σ2} v), σ1 + σ2 = s + 1.
  /// For s >= 2 these are (θ(s), θ(σ1), θ(σ2)) with σ1 = s; for s = 1 the
  /// single exponent of the L³ estimate, repeated three times. Throws
  /// DomainError when Σθ is outside (1, 2] or κ outside [1, 2).
  static EnergyBoundParams from_interpolation(int s, double gamma, double eps = 0.01, double eps1 = 0.01,
                                              double kappa = 1.9);

  double theta_sum() const;
  /// 3 - Σθ, the exponent the Hölder step produces.
  double derived_kappa() const { return 3.0 - theta_sum(); }
  void validate() const;
};

/// s + γ/2 - 1/2 - ε.
double interpolation_top(int s, double gamma, double eps);

/// θ solving σ + ε1 = θγ/2 + (1-θ)(s + γ/2 - 1/2 - ε).
double interpolation_theta(double sigma, int s, double gamma, double eps, double eps1);

/// Exponent of ‖∂_x u‖_{L³} <~ ‖u‖^θ_{H^{γ/2}} ‖|D_x|^{1/2+γ/2-ε} u‖^{1-θ}_{L^∞}.
/// σ = (5-γ+8ε)/4 and θ = 2α/3 with σ = αγ/2 + (1-α)(1/2+γ/2-ε), or 2/3 when
/// σ <= γ/2. Throws DomainError for γ <= 4/3 or θ <= 1/3.
double cubic_interpolation_theta(double gamma, double eps);

/// 2 Σ_{n<=N} n^{2s+γ} Re(conj(û(n)) r̂(n)), r = gbbm_rhs(u).
double energy_derivative_spectral(const SpectralField& u, const GbbmParams& p);

struct EnergySplit {
  double i1 = 0.0;
  double i2 = 0.0;
  /// |i1 + i2 - energy_derivative_spectral|.
  double residual = 0.0;
  /// residual <= 1e-9 max(1, |spectral|).
  bool resolved = true;
};

/// I1 = -(1/2π)∫(∂^s v) ∂^s ∂_x(v²) and
/// I2 = (1/2π)∫((1+|D|^γ)^{-1}|D|^s v) |D|^s ∂_x(v²), v = π_N u, by
/// trapezoidal quadrature on M = 2 oversample N points. v² is resolved
/// exactly once oversample >= 3.
EnergySplit energy_derivative_decomposed(const SpectralField& u, const GbbmParams& p, int oversample = 4);

/// |∫(∂^s v)(∂^{s+1} v) v + (1/2)∫∂_x v (∂^s v)²| by quadrature.
double ibp_identity_residual(const SpectralField& v, int s, int oversample = 8);

/// Oversampling used for every L^∞ and L^p norm below.
inline constexpr int kNormOversample = 8;

/// C_fit (1 + ‖π_N u‖^{3-κ}) (1 + ‖|D|^{s+γ/2-1/2-ε} π_N u‖^κ_{L^∞}), where
/// ‖·‖ in the first factor is the H^{γ/2} norm.
double energy_bound_rhs(const SpectralField& u, const GbbmParams& p, const EnergyBoundParams& b);

/// ‖∂_x^σ u‖_{L^{2/θ}} / (‖|D|^{γ/2} u‖^θ_{L²} ‖|D|^{s+γ/2-1/2-ε} u‖^{1-θ}_{L^∞}).
/// ∂_x^σ is the classical derivative for integer σ and |D|^σ otherwise.
/// Requires θ in (0, 1] and σ < θγ/2 + (1-θ)(s+γ/2-1/2-ε); at θ = 1 equality
/// is allowed. Returns 0 for the zero field.
double lp_interpolation_ratio(const SpectralField& u, double sigma, double theta, const GbbmParams& p,
                              double eps);

/// Slack θγ/2 + (1-θ)(s+γ/2-1/2-ε) - σ.
double interpolation_slack(double sigma, double theta, int s, double gamma, double eps);

/// ‖∂_x u‖_{L³} / (‖|D|^{γ/2} u‖^θ_{L²} ‖|D|^{1/2+γ/2-ε} u‖^{1-θ}_{L^∞}) with
/// θ = cubic_interpolation_theta(γ, ε). Returns 0 for the zero field.
double lp_cubic_check(const SpectralField& u, double gamma, double eps);

struct LpNormPoint {
  double p = 0.0;
  double norm = 0.0;
};

/// (E_M[X^p])^{1/p} with X(u) = ‖|D|^{s+γ/2-1/2-ε} π_N u‖_{L^∞} over M samples
/// of μ_s. Requires p in [2, 128] and M >= 10⁴.
std::vector<LpNormPoint> large_deviation_scan(const MeasureSpec& spec, double eps, const std::vector<double>& p_list,
                                              std::int64_t samples, std::uint64_t seed, unsigned workers = 0);

/// Per-sample quantities of the energy estimate.
struct EnergySampleRow {
  std::size_t index = 0;
  double lhs = 0.0;  // |d/dt E|
  double rhs = 0.0;  // energy_bound_rhs
  double ratio = 0.0;
};

/// Rows for samples sample_seed(seed, i), i < count, of μ_s.
std::vector<EnergySampleRow> energy_ensemble(const MeasureSpec& spec, const GbbmParams& p,
                                             const EnergyBoundParams& b, std::uint64_t seed, std::size_t count,
                                             unsigned workers = 0);

struct EnergyFit {
  double c_fit = 0.0;
  double calibration_max_ratio = 0.0;
  /// min over the held-out ensemble of rhs / lhs (with the fitted constant).
  double verify_min_margin = 0.0;
  std::size_t violations = 0;
  std::vector<EnergySampleRow> verify_rows;
};

/// Fits C on the calibration seed as safety × max |lhs| / rhs(C = 1) and checks
/// lhs <= rhs on the disjoint verification seed.
EnergyFit fit_energy_constant(const MeasureSpec& spec, const GbbmParams& p, EnergyBoundParams b,
                              std::uint64_t calibration_seed, std::uint64_t verify_seed, std::size_t count,
                              double safety = 2.0, unsigned workers = 0);

/// max_i ratio(sample_mu_s(spec, sample_seed(seed, i))).
double ensemble_max(const MeasureSpec& spec, std::uint64_t seed, std::size_t count,
                    const std::function<double(const SpectralField&)>& ratio, unsigned workers = 0);

}  // namespace gbbm
