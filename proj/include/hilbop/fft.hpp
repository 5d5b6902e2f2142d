#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include <fftw3.h>

namespace hilbop {

namespace detail {

// FFTW planning is not thread-safe, execution of an existing plan on new arrays is.
// Plans are created once per (size, direction) and kept for the process lifetime.
inline fftw_plan cached_plan(int n, int sign) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_pair(n, sign);
  auto it = plans.find(key);
  if (it != plans.end()) return it->second;
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  fftw_plan p = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  plans.emplace(key, p);
  return p;
}

}  // namespace detail

/// In-place unnormalized DFT. sign = -1: X_j = sum x_k e^{-2 pi i jk/n}; sign = +1 flips the exponent.
inline void fft_inplace(std::vector<std::complex<double>>& data, int sign) {
  if (data.size() < 2) return;
  const int n = static_cast<int>(data.size());
  fftw_plan p = detail::cached_plan(n, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p, ptr, ptr);
}

/// Values of sum_k c_k w^k at w = e^{2 pi i j/m}, j = 0..m-1. Coefficients beyond m
/// are folded by aliasing, so any m >= 1 is valid.
inline std::vector<std::complex<double>> circle_values(const std::vector<std::complex<double>>& c,
                                                        std::size_t m) {
  std::vector<std::complex<double>> buf(m);
  for (std::size_t k = 0; k < c.size(); ++k) buf[k % m] += c[k];
  fft_inplace(buf, +1);
  return buf;
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace hilbop
