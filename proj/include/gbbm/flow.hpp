#pragma once

#include <span>
#include <utility>
#include <vector>

#include "gbbm/spectral_field.hpp"

namespace gbbm {

/// Parameters of the truncated gBBM system
///   ∂_t u + ∂_t|D_x|^γ u + ∂_x u + ∂_x π_N((π_N u)²) = 0.
/// Phase speeds ω_n = n/(1+n^γ) lie in (0, 1] for γ >= 1, so the mode ODE is
/// not stiff.
class GbbmParams {
 public:
  GbbmParams(double gamma, int s, int n_modes, bool nonlinear = true);

  double gamma() const { return gamma_; }
  int s() const { return s_; }
  int n_modes() const { return n_modes_; }
  /// When false the quadratic term is dropped and the flow is S(t).
  bool nonlinear() const { return nonlinear_; }

  double phase_speed(int n) const;
  /// s + γ/2, the index of the Cameron-Martin space H^{s+γ/2}.
  double energy_index() const { return s_ + 0.5 * gamma_; }

  GbbmParams with_modes(int n_modes) const { return {gamma_, s_, n_modes, nonlinear_}; }
  GbbmParams linear() const { return {gamma_, s_, n_modes_, false}; }

 private:
  double gamma_;
  int s_;
  int n_modes_;
  bool nonlinear_;
};

struct IntegrateOptions {
  /// Relative drift of the conserved quantity above which the run is flagged.
  double drift_tolerance = 1e-6;
};

/// Sample path of the truncated flow with per-step diagnostics. Times are
/// strictly monotone in the direction of integration (decreasing for
/// backward runs).
struct Trajectory {
  GbbmParams params;
  std::vector<double> times;
  std::vector<SpectralField> states;
  std::vector<double> conserved_log;
  std::vector<double> energy_log;
  bool flagged = false;

  std::size_t size() const { return times.size(); }
  const SpectralField& final_state() const { return states.back(); }
  double max_relative_drift() const;
};

/// S(t): û(n) -> e^{-itω_n} û(n).
SpectralField free_evolution(const SpectralField& u, double gamma, double t);

/// Right-hand side of the mode ODE,
///   ∂_t û(n) = -iω_n (û(n) + Σ_{n1+n2=n, 0<|n1|,|n2|<=N} û(n1)û(n2)),  1 <= n <= N.
/// Throws DomainError if u carries nonzero modes above N.
SpectralField gbbm_rhs(const SpectralField& u, const GbbmParams& p);

/// ‖u‖²_{L²} + 4π‖u‖²_{H^{γ/2}} = 4π Σ (1+n^γ)|û(n)|², conserved by the flow.
double conserved_quantity(const SpectralField& u, double gamma);

/// ‖π_N u‖²_{H^{s+γ/2}}.
double truncated_energy(const SpectralField& u, const GbbmParams& p);

/// Classical RK4 for Φ_N(t) on E_N. Negative t_final runs backward. The step
/// is adjusted to dt' = t_final / ceil(|t_final|/dt) so the run ends exactly
/// at t_final. Throws FlowError on a non-finite state.
Trajectory integrate(const SpectralField& u0, const GbbmParams& p, double t_final, double dt,
                     const IntegrateOptions& options = {});

/// Final state of integrate() without storing the path.
SpectralField flow_map(const SpectralField& u0, const GbbmParams& p, double t, double dt);

/// Φ_N(t) on data with arbitrary n_max: the nonlinear flow on π_N u0 plus the
/// free evolution of the modes above N.
SpectralField galerkin_flow(const SpectralField& u0, const GbbmParams& p, double t, double dt);

struct PicardResult {
  SpectralField state;
  /// sup over quadrature nodes of the H^{γ/2} distance between iterates.
  std::vector<double> distances;
};

/// Upper bound c (1 + ‖u0‖_{H^{γ/2}})^{-1} on the Picard step.
double picard_time_limit(const SpectralField& u0, const GbbmParams& p, double contraction = 0.1);

/// Fixed point of the Duhamel map on [0, tau], iterated on `nodes`+1 uniform
/// nodes with a fourth-order cumulative quadrature. Returns u(tau). Throws
/// PicardError if the iterate distance does not fall below tol within
/// max_iter iterations.
PicardResult picard_local_solve(const SpectralField& u0, const GbbmParams& p, double tau, double tol,
                                int max_iter, int nodes = 32);

/// (∂F_n/∂a_n, ∂G_n/∂b_n) for n = 1..N by central differences of the vector
/// field in the coordinates û(n) = a_n + i b_n. The pair is
/// (2ω_n Im û(2n), -2ω_n Im û(2n)), so each entry is nonzero when 2n <= N
/// but the pair always cancels.
std::vector<std::pair<double, double>> diagonal_partials(const SpectralField& u, const GbbmParams& p);

/// max_n |∂F_n/∂a_n + ∂G_n/∂b_n|: the divergence of the vector field split
/// mode by mode. Zero up to rounding.
double divergence_diagnostic(const SpectralField& u, const GbbmParams& p);

/// Solves ∂_t v = -(1+|D_x|^γ)^{-1}∂_x(v + 2π_N(u v)) along the stored base
/// trajectory with RK4; stage values of u come from cubic Hermite
/// interpolation between stored states. Throws ResolutionError when a base
/// step is too long for the linear operator.
Trajectory linearized_flow(const Trajectory& base, const SpectralField& v0);

/// Determinant of the 2N×2N real variational matrix of Φ_N(t) at u0, in the
/// coordinates (a_1..a_N, b_1..b_N). Requires 2N <= 40.
double jacobian_determinant(const SpectralField& u0, const GbbmParams& p, double t, double dt);

/// Solution at time t of the forced linear problem
///   ∂_t u + ∂_t|D_x|^γ u + ∂_x u + ∂_x h = 0,  u(0) = 0:
/// f̂(n) = ĥ(n)(e^{-itω_n} - 1).
SpectralField forced_linear_flow(const SpectralField& h, double gamma, double t);

/// (DK(t))_{u0} v0 for K(t) = S(-t)Φ_N(t) - Id, evaluated as
/// S(-t) v(t) - v0 with v the linearized flow along `base` (which ends at t).
SpectralField dk_apply(const Trajectory& base, const SpectralField& v0);

struct DkPartialSums {
  std::vector<int> basis_dims;
  /// Σ of squared matrix entries of DK(t) over the first d modes (rows and
  /// columns) in the orthonormal H^{s+γ/2} basis.
  std::vector<double> hs_squared;
  std::vector<double> hs_norm;
};

/// Partial Hilbert-Schmidt sums of (DK(t))_{u0} for each basis dimension.
/// Columns are computed concurrently.
DkPartialSums dk_partial_sums(const SpectralField& u0, const GbbmParams& p, double t,
                              std::span<const int> basis_dims, double dt, unsigned workers = 0);

/// Frobenius norm of the basis_dim-mode truncation of (DK(t))_{u0}.
double dk_hilbert_schmidt(const SpectralField& u0, const GbbmParams& p, double t, int basis_dim,
                          double dt = 1e-3);

}  // namespace gbbm
