#include "gbbm/measures.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "gbbm/error.hpp"
#include "gbbm/flow.hpp"
#include "gbbm/parallel.hpp"

namespace gbbm {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in (0, 1].
double unit_open(std::mt19937_64& gen) { return (static_cast<double>(gen() >> 11) + 1.0) * 0x1.0p-53; }

}  // namespace

void MeasureSpec::validate() const {
  if (s < 1) throw DomainError("MeasureSpec: s must be >= 1");
  if (!(gamma > 1.0)) throw DomainError("MeasureSpec: gamma must be > 1");
  if (s < 0.5 * gamma) throw DomainError("MeasureSpec: s must be >= gamma/2");
  if (n_modes < 1) throw DomainError("MeasureSpec: n_modes must be >= 1");
  if (!(r > 0.0)) throw DomainError("MeasureSpec: r must be positive");
}

std::uint64_t sample_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

SpectralField sample_mu_s(const MeasureSpec& spec, std::uint64_t seed, int n_max) {
  if (n_max <= 0) n_max = spec.n_modes;
  std::mt19937_64 gen(seed);
  std::vector<Complex> c(static_cast<std::size_t>(n_max));
  const double decay = spec.decay();
  for (int n = 1; n <= n_max; ++n) {
    const double radius = std::sqrt(-2.0 * std::log(unit_open(gen)));
    const double angle = 2.0 * std::numbers::pi * unit_open(gen);
    const double h = radius * std::cos(angle);
    const double l = radius * std::sin(angle);
    c[n - 1] = Complex{h, l} / (std::numbers::sqrt2 * std::pow(n, decay));
  }
  return SpectralField(std::move(c));
}

SampleBatch sample_batch(const MeasureSpec& spec, std::uint64_t master_seed, std::size_t count,
                         unsigned workers) {
  SampleBatch batch{std::vector<SpectralField>(count), master_seed};
  parallel_for(
      count, [&](std::size_t i) { batch.fields[i] = sample_mu_s(spec, sample_seed(master_seed, i)); }, workers);
  return batch;
}

int cutoff_chi_r(const SpectralField& u, const MeasureSpec& spec) {
  if (std::isinf(spec.r)) return 1;
  return conserved_quantity(u, spec.gamma) <= spec.r ? 1 : 0;
}

double log_gaussian_weight(const SpectralField& u, const MeasureSpec& spec) {
  const double weight = 2.0 * spec.decay();
  const int top = std::min(u.n_max(), spec.n_modes);
  double sum = 0.0;
  for (int n = 1; n <= top; ++n) sum += std::pow(n, weight) * std::norm(u[n]);
  return -sum;
}

double expected_sobolev_moment(const MeasureSpec& spec, double sigma) {
  const double exponent = 2.0 * sigma - 2.0 * spec.s - spec.gamma;
  double sum = 0.0;
  for (int n = 1; n <= spec.n_modes; ++n) sum += std::pow(n, exponent);
  return sum;
}

}  // namespace gbbm
