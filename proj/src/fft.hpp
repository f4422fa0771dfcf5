#pragma once

#include <complex>
#include <span>

namespace gbbm::detail {

// Real-signal transforms on a uniform grid of M points, backed by FFTW.
// Plans are cached per size; execution is safe from concurrent threads.

// out[j] = Σ_{n=1}^{modes.size()} 2 Re(modes[n-1] e^{2πinj/M}), M = out.size().
// Requires M > 2 * modes.size().
void synthesize_real(std::span<const std::complex<double>> modes, std::span<double> out);

// modes[n-1] = (1/M) Σ_j samples[j] e^{-2πinj/M} for n = 1..modes.size().
// Requires M > 2 * modes.size().
void analyze_real(std::span<const double> samples, std::span<std::complex<double>> modes);

}  // namespace gbbm::detail
