#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace gbbm::detail {
namespace {

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

struct PlanPair {
  fftw_plan c2r = nullptr;
  fftw_plan r2c = nullptr;
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [size, plans] : plans_) {
      fftw_destroy_plan(plans.c2r);
      fftw_destroy_plan(plans.r2c);
    }
  }

  const PlanPair& get(int size) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(size);
    if (it != plans_.end()) return it->second;
    // Scratch arrays only shape the plan; FFTW_UNALIGNED lets the new-array
    // execute functions run on any buffer.
    std::vector<double> real(size);
    std::vector<std::complex<double>> spec(size / 2 + 1);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair plans;
    plans.c2r = fftw_plan_dft_c2r_1d(size, as_fftw(spec.data()), real.data(), flags | FFTW_DESTROY_INPUT);
    plans.r2c = fftw_plan_dft_r2c_1d(size, real.data(), as_fftw(spec.data()), flags);
    if (plans.c2r == nullptr || plans.r2c == nullptr) throw std::runtime_error("fftw planning failed");
    return plans_.emplace(size, plans).first->second;
  }

 private:
  std::mutex mutex_;
  std::map<int, PlanPair> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

struct Scratch {
  std::vector<std::complex<double>> spec;
  std::vector<double> real;
};

Scratch& scratch(int size) {
  thread_local Scratch s;
  if (static_cast<int>(s.spec.size()) < size / 2 + 1) s.spec.resize(size / 2 + 1);
  if (static_cast<int>(s.real.size()) < size) s.real.resize(size);
  return s;
}

}  // namespace

void synthesize_real(std::span<const std::complex<double>> modes, std::span<double> out) {
  const int size = static_cast<int>(out.size());
  if (size <= 2 * static_cast<int>(modes.size())) throw std::invalid_argument("grid too small for modes");
  const PlanPair& plans = cache().get(size);
  Scratch& s = scratch(size);
  const int half = size / 2 + 1;
  std::fill_n(s.spec.begin(), half, std::complex<double>{});
  std::copy(modes.begin(), modes.end(), s.spec.begin() + 1);
  fftw_execute_dft_c2r(plans.c2r, as_fftw(s.spec.data()), out.data());
}

void analyze_real(std::span<const double> samples, std::span<std::complex<double>> modes) {
  const int size = static_cast<int>(samples.size());
  if (size <= 2 * static_cast<int>(modes.size())) throw std::invalid_argument("grid too small for modes");
  const PlanPair& plans = cache().get(size);
  Scratch& s = scratch(size);
  std::copy(samples.begin(), samples.end(), s.real.begin());
  fftw_execute_dft_r2c(plans.r2c, s.real.data(), as_fftw(s.spec.data()));
  const double inv = 1.0 / size;
  for (std::size_t n = 1; n <= modes.size(); ++n)
    modes[n - 1] = s.spec[n] * inv;
}

}  // namespace gbbm::detail
