// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pac_lab Authors

#pragma once

// Uniformly sampled series and the analytic-signal operators built on them.
//
// Convention: analytic(x) = x + i*H[x], with H the discrete Hilbert transform.
// Some texts put the Hilbert transform in the real part instead; that choice
// only rotates every sample by a constant pi/2, which leaves the modulus and
// any phase difference (and therefore every PLV-based measure) unchanged.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pac_lab/error.hpp"
#include "pac_lab/fft.hpp"

namespace pac_lab {

using cd = std::complex<double>;

namespace detail {

inline void require_rate(double fs) {
  if (!(fs > 0.0) || !std::isfinite(fs))
    fail(ErrorKind::invalid_input, "sampling rate must be positive and finite");
}

}  // namespace detail

/// Real-valued time series sampled at fs Hz; sample k sits at t = k / fs.
class Signal {
 public:
  Signal(std::vector<double> samples, double fs) : samples_(std::move(samples)), fs_(fs) {
    detail::require_rate(fs_);
    if (samples_.empty()) fail(ErrorKind::invalid_input, "signal is empty");
    for (double v : samples_)
      if (!std::isfinite(v)) fail(ErrorKind::invalid_input, "signal contains a non-finite sample");
  }

  std::span<const double> samples() const noexcept { return samples_; }
  const std::vector<double>& values() const noexcept { return samples_; }
  double fs() const noexcept { return fs_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double operator[](std::size_t k) const { return samples_[k]; }
  double time(std::size_t k) const noexcept { return static_cast<double>(k) / fs_; }
  double duration() const noexcept { return static_cast<double>(samples_.size()) / fs_; }

  friend bool operator==(const Signal&, const Signal&) = default;

 private:
  std::vector<double> samples_;
  double fs_;
};

/// Complex-valued counterpart of Signal (analytic or band-limited complex output).
class ComplexSeries {
 public:
  ComplexSeries(std::vector<cd> values, double fs) : values_(std::move(values)), fs_(fs) {
    detail::require_rate(fs_);
    if (values_.empty()) fail(ErrorKind::invalid_input, "series is empty");
    for (const cd& v : values_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        fail(ErrorKind::invalid_input, "series contains a non-finite value");
  }

  std::span<const cd> values() const noexcept { return values_; }
  double fs() const noexcept { return fs_; }
  std::size_t size() const noexcept { return values_.size(); }
  const cd& operator[](std::size_t k) const { return values_[k]; }

  friend bool operator==(const ComplexSeries&, const ComplexSeries&) = default;

 private:
  std::vector<cd> values_;
  double fs_;
};

/// Analytic signal via one full-length DFT: positive-frequency bins doubled,
/// negative ones zeroed, DC and Nyquist kept.
inline ComplexSeries analytic(std::span<const double> x, double fs) {
  const std::size_t n = x.size();
  if (n < 4) fail(ErrorKind::invalid_input, "analytic signal needs at least 4 samples");
  for (double v : x)
    if (!std::isfinite(v)) fail(ErrorKind::invalid_input, "non-finite sample");

  // The half spectrum from r2c holds bins 0..n/2; the rest are zero.
  auto half = fft::forward_real(x, n);
  std::vector<cd> spectrum(n, cd{});
  spectrum[0] = half[0];
  const std::size_t last_positive = (n % 2 == 0) ? n / 2 - 1 : (n - 1) / 2;
  for (std::size_t k = 1; k <= last_positive; ++k) spectrum[k] = 2.0 * half[k];
  if (n % 2 == 0) spectrum[n / 2] = half[n / 2];

  auto z = fft::inverse(spectrum);
  // The real part is x up to round-off; store x itself so Re(z) == x exactly.
  for (std::size_t k = 0; k < n; ++k) z[k] = {x[k], z[k].imag()};
  return ComplexSeries(std::move(z), fs);
}

inline ComplexSeries analytic(const Signal& x) { return analytic(x.samples(), x.fs()); }

/// Instantaneous amplitude |z|.
inline Signal amplitude(const ComplexSeries& z) {
  std::vector<double> a(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) a[k] = std::abs(z[k]);
  return Signal(std::move(a), z.fs());
}

/// Wraps an angle into [-pi, pi).
inline double wrap_phase(double angle) {
  constexpr double pi = std::numbers::pi;
  double w = std::remainder(angle, 2.0 * pi);
  if (w >= pi) w -= 2.0 * pi;
  if (w < -pi) w += 2.0 * pi;
  return w;
}

/// Instantaneous phase arg(z) in [-pi, pi). Zero-modulus samples have no phase.
inline Signal phase(const ComplexSeries& z) {
  constexpr double pi = std::numbers::pi;
  std::vector<double> p(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (z[k] == cd{}) fail(ErrorKind::degenerate_phase, "zero-modulus sample at index " + std::to_string(k));
    const double a = std::arg(z[k]);
    p[k] = a >= pi ? a - 2.0 * pi : a;
  }
  return Signal(std::move(p), z.fs());
}

/// Removes jumps larger than pi between consecutive samples.
inline std::vector<double> unwrap(std::span<const double> wrapped) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> out(wrapped.begin(), wrapped.end());
  double offset = 0.0;
  for (std::size_t k = 1; k < out.size(); ++k) {
    const double step = wrapped[k] - wrapped[k - 1];
    if (step > std::numbers::pi) offset -= two_pi * std::ceil((step - std::numbers::pi) / two_pi);
    else if (step < -std::numbers::pi) offset += two_pi * std::ceil((-step - std::numbers::pi) / two_pi);
    out[k] = wrapped[k] + offset;
  }
  return out;
}

/// (1/2pi) d(phi)/dt of the unwrapped phase; central differences inside,
/// one-sided at the two ends. Output in Hz.
inline Signal instantaneous_frequency(const ComplexSeries& z) {
  const std::size_t n = z.size();
  if (n < 3) fail(ErrorKind::invalid_input, "instantaneous frequency needs at least 3 samples");
  const Signal wrapped = phase(z);
  const auto phi = unwrap(wrapped.samples());
  const double scale = z.fs() / (2.0 * std::numbers::pi);
  std::vector<double> f(n);
  f[0] = (phi[1] - phi[0]) * scale;
  f[n - 1] = (phi[n - 1] - phi[n - 2]) * scale;
  for (std::size_t k = 1; k + 1 < n; ++k) f[k] = 0.5 * (phi[k + 1] - phi[k - 1]) * scale;
  return Signal(std::move(f), z.fs());
}

/// Mean square of the samples.
inline double power(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc / static_cast<double>(x.size());
}

inline double power(const Signal& x) { return power(x.samples()); }

/// Drops n_edge samples from both ends.
inline Signal trim(const Signal& x, std::size_t n_edge) {
  if (2 * n_edge >= x.size())
    fail(ErrorKind::empty_result, "trimming " + std::to_string(n_edge) + " samples per side leaves nothing of " +
                                      std::to_string(x.size()));
  auto s = x.samples();
  return Signal(std::vector<double>(s.begin() + static_cast<std::ptrdiff_t>(n_edge),
                                    s.end() - static_cast<std::ptrdiff_t>(n_edge)),
                x.fs());
}

}  // namespace pac_lab
