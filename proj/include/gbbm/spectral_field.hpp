#pragma once

#include <complex>
#include <span>
#include <vector>

namespace gbbm {

using Complex = std::complex<double>;

/// Zero-mean real function on the 2π-torus, stored by its Fourier
/// coefficients û(1..n_max). Negative modes are implied by û(-n) = conj(û(n))
/// and the mean mode is never stored.
class SpectralField {
 public:
  SpectralField() : coeffs_(1) {}
  explicit SpectralField(int n_max);
  explicit SpectralField(std::vector<Complex> coeffs);

  static SpectralField single_mode(int n_max, int n, Complex value);

  int n_max() const { return static_cast<int>(coeffs_.size()); }

  /// Coefficient of signed mode n; zero outside [-n_max, n_max] and at n = 0.
  Complex coeff(int n) const;
  Complex operator[](int n) const { return coeff(n); }

  std::span<const Complex> coeffs() const { return coeffs_; }

  /// Zero-padded or truncated copy with a new highest frequency.
  SpectralField resized(int n_max) const;
  SpectralField with_mode(int n, Complex value) const;

  bool is_zero() const;
  /// Largest n with û(n) != 0, or 0 for the zero field.
  int support() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double scale);

  friend bool operator==(const SpectralField&, const SpectralField&) = default;

 private:
  std::vector<Complex> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a);
SpectralField operator*(double scale, SpectralField a);
SpectralField operator*(SpectralField a, double scale);

/// Values of the field on a uniform grid x_j = 2πj/M with
/// M = oversample × 2 × n_max.
struct GridSample {
  int oversample = 2;
  std::vector<double> values;
};

// Norms. The H^σ norm is (Σ_{n≥1} n^{2σ}|û(n)|²)^{1/2}; Lebesgue norms are
// taken with respect to dx on [0, 2π).
double sobolev_norm(const SpectralField& u, double sigma);
double sobolev_inner(const SpectralField& u, const SpectralField& v, double sigma);
double l2_norm(const SpectralField& u);

/// |D_x|^s: û(n) -> n^s û(n).
SpectralField fractional_derivative(const SpectralField& u, double s);
/// ∂_x^k for integer k >= 0: û(n) -> (in)^k û(n).
SpectralField derivative(const SpectralField& u, int order);
/// π_N; keeps n_max, zeroes modes above N.
SpectralField dirichlet_project(const SpectralField& u, int cutoff);

/// Exact (alias-free) coefficients of uv for modes 1..n_max(u)+n_max(v).
/// The mean of the product is dropped.
SpectralField pointwise_product(const SpectralField& u, const SpectralField& v);

enum class LpMode { sharp, smooth };

/// Littlewood-Paley block Δ_λ. Sharp keeps λ <= n < 2λ; smooth multiplies by
/// ψ(n/λ) with ψ(ξ) = φ(ξ) - φ(2ξ), φ a quintic smoothstep cutoff equal to 1
/// on [0,1] and 0 on [2,∞). The smooth blocks are C², supported in [λ/2, 2λ].
SpectralField lp_block(const SpectralField& u, int lambda, LpMode mode);
/// Dyadic λ = 1, 2, 4, ... whose blocks sum to the identity on modes <= n_max.
std::vector<int> dyadic_levels(int n_max, LpMode mode);
double lp_bump(double xi);

/// max_j |u(x_j)| on the oversampled grid. A lower bound for the L^∞ norm
/// that converges as the oversampling grows.
double sup_norm(const SpectralField& u, int oversample);
/// (Σ_j |u(x_j)|^p Δx)^{1/p}.
double lebesgue_norm(const SpectralField& u, double p, int oversample);

GridSample to_grid(const SpectralField& u, int oversample);
SpectralField from_grid(const GridSample& grid, int n_max);

/// Samples of u on an arbitrary uniform grid with grid_size > 2 n_max points.
std::vector<double> synthesize(const SpectralField& u, int grid_size);
/// Inverse of synthesize for the first n_max modes.
SpectralField analyze(std::span<const double> samples, int n_max);

}  // namespace gbbm
