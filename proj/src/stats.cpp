#include "gbbm/stats.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "gbbm/error.hpp"

namespace gbbm {

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

EstimateWithError estimate_mean(std::span<const double> values, std::uint64_t master_seed) {
  EstimateWithError est;
  est.n_samples = static_cast<std::int64_t>(values.size());
  est.master_seed = master_seed;
  if (values.empty()) return est;
  const double n = static_cast<double>(values.size());
  est.value = pairwise_sum(values) / n;
  if (values.size() > 1) {
    std::vector<double> dev(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) dev[i] = (values[i] - est.value) * (values[i] - est.value);
    est.std_error = std::sqrt(pairwise_sum(dev) / (n - 1.0) / n);
  }
  return est;
}

double combined_z(const EstimateWithError& a, const EstimateWithError& b) {
  const double diff = std::abs(a.value - b.value);
  const double se = std::hypot(a.std_error, b.std_error);
  if (se == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / se;
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("least_squares_slope: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw DomainError("least_squares_slope: x values are all equal");
  return sxy / sxx;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("loglog_slope: x and y differ in length");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("loglog_slope: values must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return least_squares_slope(lx, ly);
}

}  // namespace gbbm
