#pragma once

// Centered discrete Fourier transforms on top of FFTW.
//
// Sample m of a time series sits at t_m = (m - n/2) dt and bin k of a spectrum
// at omega_k = (k - n/2) domega, so both arrays are stored in ascending order.
// With the exp(-i omega t) field convention:
//
//   spectrum_k = sum_m E_m exp(+i omega_k t_m)
//   E_m        = (1/n) sum_k spectrum_k exp(-i omega_k t_m)

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "slowlight/errors.hpp"

namespace slowlight::detail {

/// Process-wide cache of FFTW plans.  Planning is serialized; executing a
/// cached plan through fftw_execute_dft is thread-safe.
class FftPlanCache {
 public:
  static FftPlanCache& instance() {
    static FftPlanCache cache;
    return cache;
  }

  fftw_plan plan(std::size_t n, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const int size = static_cast<int>(n);
    std::unique_ptr<fftw_complex, decltype(&fftw_free)> in(
        fftw_alloc_complex(n), &fftw_free);
    std::unique_ptr<fftw_complex, decltype(&fftw_free)> out(
        fftw_alloc_complex(n), &fftw_free);
    fftw_plan p = fftw_plan_dft_1d(size, in.get(), out.get(), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (p == nullptr) throw ContractError("FFTW failed to create a plan");
    plans_.emplace(key, p);
    return p;
  }

  FftPlanCache(const FftPlanCache&) = delete;
  FftPlanCache& operator=(const FftPlanCache&) = delete;

 private:
  FftPlanCache() = default;
  ~FftPlanCache() {
    for (auto& [key, p] : plans_) fftw_destroy_plan(p);
  }

  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

inline std::vector<std::complex<double>> centered_dft(std::span<const std::complex<double>> in,
                                                      int sign) {
  const std::size_t n = in.size();
  if (n == 0 || n % 2 != 0) throw ContractError("centered DFT needs an even, non-zero length");
  const std::size_t half = n / 2;
  std::vector<std::complex<double>> shifted(n);
  std::vector<std::complex<double>> out(n);
  std::rotate_copy(in.begin(), in.begin() + static_cast<std::ptrdiff_t>(half), in.end(),
                   shifted.begin());
  fftw_execute_dft(FftPlanCache::instance().plan(n, sign),
                   reinterpret_cast<fftw_complex*>(shifted.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  std::rotate(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(half), out.end());
  return out;
}

inline std::vector<std::complex<double>> to_spectrum(std::span<const std::complex<double>> time) {
  return centered_dft(time, FFTW_BACKWARD);
}

inline std::vector<std::complex<double>> to_time(std::span<const std::complex<double>> spectrum) {
  auto out = centered_dft(spectrum, FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(out.size());
  for (auto& v : out) v *= scale;
  return out;
}

}  // namespace slowlight::detail
