#pragma once

#include <cstdint>
#include <span>

namespace gbbm {

/// Monte Carlo mean with its standard error (sample sd / √n).
struct EstimateWithError {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  std::uint64_t master_seed = 0;
};

/// Deterministic pairwise (tree) sum; the result depends only on the order of
/// the values, not on how they were produced.
double pairwise_sum(std::span<const double> values);

EstimateWithError estimate_mean(std::span<const double> values, std::uint64_t master_seed);

/// |a - b| / sqrt(se_a² + se_b²); zero when both errors vanish and a == b.
double combined_z(const EstimateWithError& a, const EstimateWithError& b);

/// Least-squares slope of y against x.
double least_squares_slope(std::span<const double> x, std::span<const double> y);

/// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace gbbm
