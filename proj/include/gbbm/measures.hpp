#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "gbbm/spectral_field.hpp"

namespace gbbm {

/// Identifies μ_{s,r} = χ_r μ_s and its truncation to E_N.
struct MeasureSpec {
  int s = 1;
  double gamma = 2.0;
  int n_modes = 1;
  /// Cutoff radius of χ_r; +∞ disables the cutoff.
  double r = std::numeric_limits<double>::infinity();

  /// Throws DomainError unless s >= 1, γ > 1, s >= γ/2, N >= 1 and r > 0.
  void validate() const;
  /// s + γ/2.
  double decay() const { return s + 0.5 * gamma; }
};

/// Seed of sample `index` in a batch, a SplitMix64 mix of (master, index).
std::uint64_t sample_seed(std::uint64_t master_seed, std::uint64_t index);

/// û(n) = (h_n + i l_n) / (√2 n^{s+γ/2}) for 1 <= n <= n_max with h_n, l_n
/// independent standard normals. Normals come from Box-Muller over
/// std::mt19937_64 seeded with `seed`, drawn in mode order, so the first N
/// modes of a sample do not depend on n_max. n_max defaults to spec.n_modes.
SpectralField sample_mu_s(const MeasureSpec& spec, std::uint64_t seed, int n_max = 0);

struct SampleBatch {
  std::vector<SpectralField> fields;
  std::uint64_t master_seed = 0;
};

/// fields[i] = sample_mu_s(spec, sample_seed(master_seed, i)).
SampleBatch sample_batch(const MeasureSpec& spec, std::uint64_t master_seed, std::size_t count,
                         unsigned workers = 0);

/// 1 iff ‖u‖²_{L²} + 4π‖u‖²_{H^{γ/2}} <= r.
int cutoff_chi_r(const SpectralField& u, const MeasureSpec& spec);

/// -‖π_N u‖²_{H^{s+γ/2}}, the log density of the truncated Gaussian up to its
/// normalization constant.
double log_gaussian_weight(const SpectralField& u, const MeasureSpec& spec);

/// E‖π_N φ_s‖²_{H^σ} = Σ_{n=1}^N n^{2σ-2s-γ}.
double expected_sobolev_moment(const MeasureSpec& spec, double sigma);

}  // namespace gbbm
