// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pac_lab Authors

#pragma once

// Gaussian band-pass filters: real Gabor kernels (constant or proportional
// bandwidth), complex Morlet kernels, and the three-leg filter used by
// modulatory component analysis.
//
// All filtering is a same-length, zero-phase convolution computed with FFTs on
// a copy of the input mirrored about its first and last samples.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pac_lab/error.hpp"
#include "pac_lab/fft.hpp"
#include "pac_lab/signal.hpp"

namespace pac_lab {

/// Fixed -3 dB width in Hz, independent of the center frequency.
struct ConstantBandwidth {
  double bw_hz = 1.0;
};

/// Width tied to the center frequency through a cycle count (Morlet style).
struct Proportional {
  double cycles = 4.0;
};

struct FilterSpec {
  double center = 0.0;
  std::variant<ConstantBandwidth, Proportional> mode = ConstantBandwidth{};
  /// Kernel support on each side, in envelope standard deviations.
  double truncation = 4.0;

  static FilterSpec constant(double center, double bw_hz, double truncation = 4.0) {
    return {center, ConstantBandwidth{bw_hz}, truncation};
  }
  static FilterSpec proportional(double center, double cycles, double truncation = 4.0) {
    return {center, Proportional{cycles}, truncation};
  }
};

inline void validate(const FilterSpec& spec) {
  if (!(spec.center > 0.0) || !std::isfinite(spec.center))
    fail(ErrorKind::invalid_input, "filter center must be positive");
  if (!(spec.truncation > 0.0)) fail(ErrorKind::invalid_input, "kernel truncation must be positive");
  if (const auto* c = std::get_if<ConstantBandwidth>(&spec.mode)) {
    if (!(c->bw_hz > 0.0)) fail(ErrorKind::invalid_input, "bandwidth must be positive");
  } else if (const auto* p = std::get_if<Proportional>(&spec.mode)) {
    if (!(p->cycles >= 1.0)) fail(ErrorKind::invalid_input, "cycle count must be at least 1");
  }
}

/// Gaussian envelope coefficient beta in exp(-(beta t)^2) whose magnitude
/// response falls to one half at center +/- bw/2.
inline double gabor_beta(double bw_hz) {
  return std::numbers::pi * bw_hz / (2.0 * std::sqrt(std::numbers::ln2));
}

/// Standard deviation (seconds) of the kernel's Gaussian envelope.
inline double envelope_sigma(const FilterSpec& spec) {
  if (const auto* c = std::get_if<ConstantBandwidth>(&spec.mode))
    return 1.0 / (gabor_beta(c->bw_hz) * std::numbers::sqrt2);
  const auto& p = std::get<Proportional>(spec.mode);
  return p.cycles / (2.0 * std::numbers::pi * spec.center);
}

/// Odd-length tap set centered on its middle tap.
class Kernel {
 public:
  Kernel(std::vector<cd> taps, double fs, bool real) : taps_(std::move(taps)), fs_(fs), real_(real) {
    if (taps_.size() % 2 == 0) fail(ErrorKind::invalid_input, "kernel length must be odd");
  }

  std::span<const cd> taps() const noexcept { return taps_; }
  std::size_t size() const noexcept { return taps_.size(); }
  std::size_t half_length() const noexcept { return (taps_.size() - 1) / 2; }
  double fs() const noexcept { return fs_; }
  bool is_real() const noexcept { return real_; }

  std::vector<double> real_taps() const {
    std::vector<double> r(taps_.size());
    for (std::size_t j = 0; j < taps_.size(); ++j) r[j] = taps_[j].real();
    return r;
  }
  std::vector<double> imag_taps() const {
    std::vector<double> r(taps_.size());
    for (std::size_t j = 0; j < taps_.size(); ++j) r[j] = taps_[j].imag();
    return r;
  }

  /// Frequency response sum_j taps[j] exp(-i 2 pi f t_j), t_j relative to the center tap.
  cd response(double f) const {
    const double h = static_cast<double>(half_length());
    cd acc{};
    for (std::size_t j = 0; j < taps_.size(); ++j) {
      const double t = (static_cast<double>(j) - h) / fs_;
      acc += taps_[j] * std::polar(1.0, -2.0 * std::numbers::pi * f * t);
    }
    return acc;
  }

 private:
  std::vector<cd> taps_;
  double fs_;
  bool real_;
};

namespace detail {

inline std::size_t half_taps(double sigma_t, double truncation, double fs) {
  return static_cast<std::size_t>(std::floor(truncation * sigma_t * fs));
}

inline void require_below_nyquist(double center, double fs) {
  if (!(center < fs / 2.0))
    fail(ErrorKind::aliasing, "center " + std::to_string(center) + " Hz is not below Nyquist (" +
                                  std::to_string(fs / 2.0) + " Hz)");
}

}  // namespace detail

/// Real Gabor kernel exp(-(t/sigma)^2 / 2) cos(2 pi center t), unit gain at center.
inline Kernel gabor_kernel(const FilterSpec& spec, double fs) {
  validate(spec);
  detail::require_rate(fs);
  detail::require_below_nyquist(spec.center, fs);
  const double sigma = envelope_sigma(spec);
  const std::size_t h = detail::half_taps(sigma, spec.truncation, fs);
  std::vector<cd> taps(2 * h + 1);
  for (std::size_t j = 0; j < taps.size(); ++j) {
    const double t = (static_cast<double>(j) - static_cast<double>(h)) / fs;
    const double g = std::exp(-0.5 * (t / sigma) * (t / sigma));
    taps[j] = g * std::cos(2.0 * std::numbers::pi * spec.center * t);
  }
  Kernel raw(std::move(taps), fs, true);
  const double gain = std::abs(raw.response(spec.center));
  std::vector<cd> scaled(raw.taps().begin(), raw.taps().end());
  for (cd& v : scaled) v /= gain;
  return Kernel(std::move(scaled), fs, true);
}

/// Complex Morlet kernel exp(i 2 pi center t) exp(-t^2 / (2 sigma^2)) with
/// sigma = cycles / (2 pi center). Scaled so a real tone A cos(2 pi center t)
/// comes out with modulus A, i.e. unit gain with respect to the analytic signal.
inline Kernel morlet_kernel(double center, double cycles, double fs, double truncation = 4.0) {
  const FilterSpec spec = FilterSpec::proportional(center, cycles, truncation);
  validate(spec);
  detail::require_rate(fs);
  detail::require_below_nyquist(center, fs);
  const double sigma = envelope_sigma(spec);
  const std::size_t h = detail::half_taps(sigma, truncation, fs);
  std::vector<cd> taps(2 * h + 1);
  for (std::size_t j = 0; j < taps.size(); ++j) {
    const double t = (static_cast<double>(j) - static_cast<double>(h)) / fs;
    const double g = std::exp(-0.5 * (t / sigma) * (t / sigma));
    taps[j] = g * std::polar(1.0, 2.0 * std::numbers::pi * center * t);
  }
  Kernel raw(std::move(taps), fs, false);
  const double gain = std::abs(raw.response(center)) / 2.0;
  std::vector<cd> scaled(raw.taps().begin(), raw.taps().end());
  for (cd& v : scaled) v /= gain;
  return Kernel(std::move(scaled), fs, false);
}

namespace detail {

/// x mirrored about its end samples: x[h] .. x[1], x[0..n-1], x[n-2] .. x[n-1-h].
inline std::vector<double> reflect_pad(std::span<const double> x, std::size_t h) {
  const std::size_t n = x.size();
  std::vector<double> padded(n + 2 * h);
  for (std::size_t p = 0; p < padded.size(); ++p) {
    const auto i = static_cast<std::ptrdiff_t>(p) - static_cast<std::ptrdiff_t>(h);
    std::ptrdiff_t idx = i;
    if (idx < 0) idx = -idx;
    if (idx >= static_cast<std::ptrdiff_t>(n)) idx = 2 * (static_cast<std::ptrdiff_t>(n) - 1) - idx;
    padded[p] = x[static_cast<std::size_t>(idx)];
  }
  return padded;
}

inline void require_fits(std::size_t kernel_len, std::size_t signal_len) {
  if (kernel_len > signal_len)
    fail(ErrorKind::signal_too_short, "kernel of " + std::to_string(kernel_len) + " taps exceeds signal of " +
                                          std::to_string(signal_len) + " samples");
}

/// Same-length convolution of x with one or more real tap sets of equal odd
/// length, sharing the transform of the padded input.
inline std::vector<std::vector<double>> convolve_reflect(std::span<const double> x,
                                                         std::span<const std::vector<double>> tap_sets) {
  const std::size_t n = x.size();
  const std::size_t len = tap_sets.front().size();
  require_fits(len, n);
  const std::size_t h = (len - 1) / 2;
  const auto padded = reflect_pad(x, h);
  const std::size_t m = fft::good_size(padded.size() + len - 1);
  const auto xs = fft::forward_real(padded, m);

  std::vector<std::vector<double>> outputs;
  outputs.reserve(tap_sets.size());
  for (const auto& taps : tap_sets) {
    const auto ks = fft::forward_real(taps, m);
    std::vector<cd> prod(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) prod[k] = xs[k] * ks[k];
    const auto full = fft::inverse_real(prod, m);
    outputs.emplace_back(full.begin() + static_cast<std::ptrdiff_t>(2 * h),
                         full.begin() + static_cast<std::ptrdiff_t>(2 * h + n));
  }
  return outputs;
}

}  // namespace detail

/// Zero-phase convolution of x with a real kernel.
inline Signal bandpass(const Signal& x, const Kernel& kernel) {
  if (!kernel.is_real()) fail(ErrorKind::invalid_input, "bandpass expects a real kernel");
  const std::vector<double> taps[] = {kernel.real_taps()};
  auto out = detail::convolve_reflect(x.samples(), taps);
  return Signal(std::move(out.front()), x.fs());
}

inline Signal bandpass(const Signal& x, const FilterSpec& spec) {
  return bandpass(x, gabor_kernel(spec, x.fs()));
}

/// Convolution with a complex Morlet kernel; the result is the analytic band
/// signal (modulus = amplitude envelope, argument = phase).
inline ComplexSeries morlet_bandpass(const Signal& x, const Kernel& kernel) {
  const std::vector<double> taps[] = {kernel.real_taps(), kernel.imag_taps()};
  auto out = detail::convolve_reflect(x.samples(), taps);
  std::vector<cd> z(x.size());
  for (std::size_t k = 0; k < z.size(); ++k) z[k] = {out[0][k], out[1][k]};
  return ComplexSeries(std::move(z), x.fs());
}

inline ComplexSeries morlet_bandpass(const Signal& x, double center, double cycles, double truncation = 4.0) {
  return morlet_bandpass(x, morlet_kernel(center, cycles, x.fs(), truncation));
}

/// Checks the band layout of a three-leg filter at (m, n).
inline void require_triplet_bands(double m, double n, double fs) {
  if (!(m >= 1.0)) fail(ErrorKind::out_of_band, "modulating frequency must be at least 1 Hz");
  if (!(n - m >= 1.0)) fail(ErrorKind::out_of_band, "lower leg n - m must be at least 1 Hz");
  if (!(n + m < fs / 2.0)) fail(ErrorKind::out_of_band, "upper leg n + m must be below Nyquist");
}

/// X_{n-m} + 2 X_n + X_{n+m} from already filtered legs.
inline Signal triplet_sum(const Signal& lower, const Signal& center, const Signal& upper) {
  if (lower.size() != center.size() || upper.size() != center.size())
    fail(ErrorKind::invalid_input, "triplet legs differ in length");
  std::vector<double> out(center.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = lower[k] + 2.0 * center[k] + upper[k];
  return Signal(std::move(out), center.fs());
}

/// Three constant-bandwidth legs at n - m, n (weighted twice) and n + m. The
/// carrier and both AM sidebands pass at unit gain while everything between
/// the legs is rejected.
inline Signal triplet(const Signal& x, double m, double n, double bw_hz = 1.0, double truncation = 4.0) {
  require_triplet_bands(m, n, x.fs());
  return triplet_sum(bandpass(x, FilterSpec::constant(n - m, bw_hz, truncation)),
                     bandpass(x, FilterSpec::constant(n, bw_hz, truncation)),
                     bandpass(x, FilterSpec::constant(n + m, bw_hz, truncation)));
}

}  // namespace pac_lab
