// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pac_lab Authors

#pragma once

// Thin RAII layer over FFTW. Plans are created once per (kind, length) under a
// mutex and executed through the new-array interface, which FFTW documents as
// thread-safe. All buffers come from fftw_malloc so every execution sees the
// same alignment as the planning arrays and results are bitwise repeatable.

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

namespace pac_lab::fft {

using cd = std::complex<double>;

namespace detail {

enum class PlanKind { r2c, c2r, forward, inverse };

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> allocate(std::size_t n) {
  return FftwBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1))));
}

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

  fftw_plan get(PlanKind kind, std::size_t n) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_pair(kind, n);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    const int len = static_cast<int>(n);
    fftw_plan plan = nullptr;
    auto cin = allocate<fftw_complex>(n);
    auto cout = allocate<fftw_complex>(n);
    auto rbuf = allocate<double>(n);
    switch (kind) {
      case PlanKind::r2c:
        plan = fftw_plan_dft_r2c_1d(len, rbuf.get(), cout.get(), FFTW_ESTIMATE);
        break;
      case PlanKind::c2r:
        plan = fftw_plan_dft_c2r_1d(len, cin.get(), rbuf.get(), FFTW_ESTIMATE);
        break;
      case PlanKind::forward:
        plan = fftw_plan_dft_1d(len, cin.get(), cout.get(), FFTW_FORWARD, FFTW_ESTIMATE);
        break;
      case PlanKind::inverse:
        plan = fftw_plan_dft_1d(len, cin.get(), cout.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
        break;
    }
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  PlanCache() = default;

  std::mutex mutex_;
  std::map<std::pair<PlanKind, std::size_t>, fftw_plan> plans_;
};

}  // namespace detail

/// Smallest length >= n whose only prime factors are 2, 3, 5 and 7.
inline std::size_t good_size(std::size_t n) {
  if (n <= 1) return 1;
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u, 7u})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

/// Half spectrum (n/2 + 1 bins) of x zero-padded (or truncated) to n points.
inline std::vector<cd> forward_real(std::span<const double> x, std::size_t n) {
  auto in = detail::allocate<double>(n);
  auto out = detail::allocate<fftw_complex>(n / 2 + 1);
  const std::size_t copy = std::min(n, x.size());
  std::copy_n(x.begin(), copy, in.get());
  std::fill(in.get() + copy, in.get() + n, 0.0);
  fftw_execute_dft_r2c(detail::PlanCache::instance().get(detail::PlanKind::r2c, n), in.get(),
                       out.get());
  std::vector<cd> spectrum(n / 2 + 1);
  for (std::size_t k = 0; k < spectrum.size(); ++k) spectrum[k] = {out[k][0], out[k][1]};
  return spectrum;
}

/// Inverse of forward_real, scaled by 1/n.
inline std::vector<double> inverse_real(std::span<const cd> half, std::size_t n) {
  auto in = detail::allocate<fftw_complex>(n / 2 + 1);
  auto out = detail::allocate<double>(n);
  for (std::size_t k = 0; k < n / 2 + 1; ++k) {
    const cd v = k < half.size() ? half[k] : cd{};
    in[k][0] = v.real();
    in[k][1] = v.imag();
  }
  fftw_execute_dft_c2r(detail::PlanCache::instance().get(detail::PlanKind::c2r, n), in.get(),
                       out.get());
  std::vector<double> result(out.get(), out.get() + n);
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : result) v *= scale;
  return result;
}

namespace detail {

inline std::vector<cd> complex_transform(std::span<const cd> x, std::size_t n, PlanKind kind) {
  auto in = allocate<fftw_complex>(n);
  auto out = allocate<fftw_complex>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const cd v = k < x.size() ? x[k] : cd{};
    in[k][0] = v.real();
    in[k][1] = v.imag();
  }
  fftw_execute_dft(PlanCache::instance().get(kind, n), in.get(), out.get());
  std::vector<cd> result(n);
  for (std::size_t k = 0; k < n; ++k) result[k] = {out[k][0], out[k][1]};
  return result;
}

}  // namespace detail

inline std::vector<cd> forward(std::span<const cd> x, std::size_t n) {
  return detail::complex_transform(x, n, detail::PlanKind::forward);
}

inline std::vector<cd> forward(std::span<const cd> x) { return forward(x, x.size()); }

/// Inverse complex transform, scaled by 1/n.
inline std::vector<cd> inverse(std::span<const cd> x, std::size_t n) {
  auto result = detail::complex_transform(x, n, detail::PlanKind::inverse);
  const double scale = 1.0 / static_cast<double>(n);
  for (cd& v : result) v *= scale;
  return result;
}

inline std::vector<cd> inverse(std::span<const cd> x) { return inverse(x, x.size()); }

}  // namespace pac_lab::fft
