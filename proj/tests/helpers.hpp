#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "gbbm/spectral_field.hpp"

namespace gbbm::testing {

// Field with û(n) = (a + ib) n^{-decay}, a, b uniform in [-1, 1].
inline SpectralField random_field(int n_max, unsigned seed, double decay = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Complex> c(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) {
    const double re = unit(rng);
    const double im = unit(rng);
    c[n - 1] = Complex{re, im} * std::pow(n, -decay);
  }
  return SpectralField(std::move(c));
}

// Full two-sided direct convolution Σ_{n1+n2=n} û(n1)v̂(n2) over all nonzero
// n1, n2, for n >= 1.
inline std::vector<Complex> direct_convolution(const SpectralField& u, const SpectralField& v, int n_out) {
  auto coeff = [](const SpectralField& f, int n) { return f[n]; };
  std::vector<Complex> out(static_cast<std::size_t>(n_out));
  const int span = u.n_max() + v.n_max();
  for (int n = 1; n <= n_out; ++n) {
    Complex sum{};
    for (int a = -span; a <= span; ++a) {
      if (a == 0 || a == n) continue;
      sum += coeff(u, a) * coeff(v, n - a);
    }
    out[n - 1] = sum;
  }
  return out;
}

inline double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  const int n = std::max(a.n_max(), b.n_max());
  double worst = 0.0;
  for (int k = 1; k <= n; ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst;
}

}  // namespace gbbm::testing
