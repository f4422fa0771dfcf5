#include "gbbm/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "gbbm/error.hpp"

namespace gbbm {
namespace {

// Direct convolution is cheaper than zero-padded transforms below this size.
constexpr int kDirectProductLimit = 32;

int next_pow2(int n) {
  int m = 1;
  while (m < n) m <<= 1;
  return m;
}

void check_oversample(int oversample) {
  if (oversample < 2) throw DomainError("oversample must be >= 2");
}

}  // namespace

SpectralField::SpectralField(int n_max) {
  if (n_max < 1) throw DomainError("SpectralField: n_max must be >= 1");
  coeffs_.assign(static_cast<std::size_t>(n_max), Complex{});
}

SpectralField::SpectralField(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw DomainError("SpectralField: n_max must be >= 1");
  for (const Complex& c : coeffs_)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw DomainError("SpectralField: non-finite coefficient");
}

SpectralField SpectralField::single_mode(int n_max, int n, Complex value) {
  return SpectralField(n_max).with_mode(n, value);
}

Complex SpectralField::coeff(int n) const {
  if (n == 0 || std::abs(n) > n_max()) return {};
  return n > 0 ? coeffs_[n - 1] : std::conj(coeffs_[-n - 1]);
}

SpectralField SpectralField::resized(int n_max) const {
  std::vector<Complex> c(coeffs_);
  if (n_max < 1) throw DomainError("SpectralField: n_max must be >= 1");
  c.resize(static_cast<std::size_t>(n_max));
  return SpectralField(std::move(c));
}

SpectralField SpectralField::with_mode(int n, Complex value) const {
  if (n < 1 || n > n_max()) throw DomainError("SpectralField: mode out of range");
  std::vector<Complex> c(coeffs_);
  c[n - 1] = value;
  return SpectralField(std::move(c));
}

bool SpectralField::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](Complex c) { return c == Complex{}; });
}

int SpectralField::support() const {
  for (int n = n_max(); n >= 1; --n)
    if (coeffs_[n - 1] != Complex{}) return n;
  return 0;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  if (other.n_max() > n_max()) coeffs_.resize(other.coeffs_.size());
  for (int n = 0; n < other.n_max(); ++n) coeffs_[n] += other.coeffs_[n];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  if (other.n_max() > n_max()) coeffs_.resize(other.coeffs_.size());
  for (int n = 0; n < other.n_max(); ++n) coeffs_[n] -= other.coeffs_[n];
  return *this;
}

SpectralField& SpectralField::operator*=(double scale) {
  for (Complex& c : coeffs_) c *= scale;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator-(SpectralField a) { return a *= -1.0; }
SpectralField operator*(double scale, SpectralField a) { return a *= scale; }
SpectralField operator*(SpectralField a, double scale) { return a *= scale; }

double sobolev_norm(const SpectralField& u, double sigma) {
  return std::sqrt(sobolev_inner(u, u, sigma));
}

double sobolev_inner(const SpectralField& u, const SpectralField& v, double sigma) {
  const int n_common = std::min(u.n_max(), v.n_max());
  double sum = 0.0;
  for (int n = 1; n <= n_common; ++n)
    sum += std::pow(n, 2.0 * sigma) * (u[n] * std::conj(v[n])).real();
  return sum;
}

double l2_norm(const SpectralField& u) {
  double sum = 0.0;
  for (Complex c : u.coeffs()) sum += std::norm(c);
  return std::sqrt(4.0 * std::numbers::pi * sum);
}

SpectralField fractional_derivative(const SpectralField& u, double s) {
  std::vector<Complex> c(u.coeffs().begin(), u.coeffs().end());
  for (int n = 1; n <= u.n_max(); ++n) c[n - 1] *= std::pow(static_cast<double>(n), s);
  return SpectralField(std::move(c));
}

SpectralField derivative(const SpectralField& u, int order) {
  if (order < 0) throw DomainError("derivative: order must be >= 0");
  // i^order cycles through 1, i, -1, -i.
  static constexpr Complex kPowI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  std::vector<Complex> c(u.coeffs().begin(), u.coeffs().end());
  for (int n = 1; n <= u.n_max(); ++n)
    c[n - 1] *= kPowI[order % 4] * std::pow(static_cast<double>(n), order);
  return SpectralField(std::move(c));
}

SpectralField dirichlet_project(const SpectralField& u, int cutoff) {
  if (cutoff < 0) throw DomainError("dirichlet_project: cutoff must be >= 0");
  std::vector<Complex> c(u.coeffs().begin(), u.coeffs().end());
  for (int n = cutoff + 1; n <= u.n_max(); ++n) c[n - 1] = {};
  return SpectralField(std::move(c));
}

SpectralField pointwise_product(const SpectralField& u, const SpectralField& v) {
  const int nu = u.n_max();
  const int nv = v.n_max();
  const int n_out = nu + nv;
  if (std::max(nu, nv) < kDirectProductLimit) {
    std::vector<Complex> c(n_out);
    for (int n = 1; n <= n_out; ++n) {
      Complex sum{};
      for (int a = std::max(-nu, n - nv); a <= std::min(nu, n + nv); ++a) sum += u[a] * v[n - a];
      c[n - 1] = sum;
    }
    return SpectralField(std::move(c));
  }
  const int grid = next_pow2(2 * n_out + 1);
  std::vector<double> gu = synthesize(u, grid);
  const std::vector<double> gv = synthesize(v, grid);
  for (int j = 0; j < grid; ++j) gu[j] *= gv[j];
  return analyze(gu, n_out);
}

double lp_bump(double xi) {
  // φ(ξ) = 1 on [0,1], 0 on [2,∞), quintic smoothstep between; ψ(ξ) = φ(ξ) - φ(2ξ).
  auto cutoff = [](double x) {
    if (x <= 1.0) return 1.0;
    if (x >= 2.0) return 0.0;
    const double t = x - 1.0;
    return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
  };
  return cutoff(xi) - cutoff(2.0 * xi);
}

SpectralField lp_block(const SpectralField& u, int lambda, LpMode mode) {
  if (lambda < 1 || (lambda & (lambda - 1)) != 0) throw DomainError("lp_block: lambda must be a power of two");
  std::vector<Complex> c(u.coeffs().begin(), u.coeffs().end());
  for (int n = 1; n <= u.n_max(); ++n) {
    double weight;
    if (mode == LpMode::sharp)
      weight = (n >= lambda && n < 2 * lambda) ? 1.0 : 0.0;
    else
      weight = lp_bump(static_cast<double>(n) / lambda);
    c[n - 1] *= weight;
  }
  return SpectralField(std::move(c));
}

std::vector<int> dyadic_levels(int n_max, LpMode mode) {
  // Sharp blocks need 2λ > n_max; smooth blocks need the last λ >= n_max so
  // that φ(n/λ) = 1 on every retained mode.
  std::vector<int> levels;
  for (int lambda = 1;; lambda *= 2) {
    levels.push_back(lambda);
    if (mode == LpMode::sharp ? 2 * lambda > n_max : lambda >= n_max) break;
  }
  return levels;
}

std::vector<double> synthesize(const SpectralField& u, int grid_size) {
  std::vector<double> out(static_cast<std::size_t>(grid_size));
  detail::synthesize_real(u.coeffs(), out);
  return out;
}

SpectralField analyze(std::span<const double> samples, int n_max) {
  std::vector<Complex> c(static_cast<std::size_t>(n_max));
  detail::analyze_real(samples, c);
  return SpectralField(std::move(c));
}

GridSample to_grid(const SpectralField& u, int oversample) {
  check_oversample(oversample);
  return {oversample, synthesize(u, oversample * 2 * u.n_max())};
}

SpectralField from_grid(const GridSample& grid, int n_max) { return analyze(grid.values, n_max); }

double sup_norm(const SpectralField& u, int oversample) {
  check_oversample(oversample);
  const std::vector<double> g = synthesize(u, oversample * 2 * u.n_max());
  double best = 0.0;
  for (double x : g) best = std::max(best, std::abs(x));
  return best;
}

double lebesgue_norm(const SpectralField& u, double p, int oversample) {
  check_oversample(oversample);
  if (!(p >= 1.0)) throw DomainError("lebesgue_norm: p must be >= 1");
  const std::vector<double> g = synthesize(u, oversample * 2 * u.n_max());
  double scale = 0.0;
  for (double x : g) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return 0.0;
  // Factor out the maximum so large p cannot overflow.
  double sum = 0.0;
  for (double x : g) sum += std::pow(std::abs(x) / scale, p);
  const double dx = 2.0 * std::numbers::pi / static_cast<double>(g.size());
  return scale * std::pow(sum * dx, 1.0 / p);
}

}  // namespace gbbm
