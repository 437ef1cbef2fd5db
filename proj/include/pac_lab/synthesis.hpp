// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pac_lab Authors

#pragma once

// Synthetic pure-PAC test signals:
//
//   x(t) = s * [ sin(2 pi m t) + (0.5 + ami sin(2 pi m t)) cos(2 pi n t) ] + pink(t)
//
// with pink noise built by spectral synthesis and scaled to an exact power.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pac_lab/error.hpp"
#include "pac_lab/fft.hpp"
#include "pac_lab/signal.hpp"

namespace pac_lab {

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw, so the
/// stream is identical on every standard library.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// 1/f noise: random phase per positive-frequency bin, amplitude proportional
/// to 1/sqrt(f), zero DC, rescaled so its mean square equals target_power.
inline Signal pink_noise(std::size_t n_samples, double fs, double target_power, std::uint64_t seed) {
  if (n_samples < 2) fail(ErrorKind::invalid_input, "pink noise needs at least 2 samples");
  if (!(target_power >= 0.0) || !std::isfinite(target_power))
    fail(ErrorKind::invalid_input, "target power must be non-negative");
  detail::require_rate(fs);
  if (target_power == 0.0) return Signal(std::vector<double>(n_samples, 0.0), fs);

  std::mt19937_64 rng(seed);
  const std::size_t bins = n_samples / 2 + 1;
  std::vector<cd> spectrum(bins, cd{});
  for (std::size_t k = 1; k < bins; ++k) {
    const double f = static_cast<double>(k) * fs / static_cast<double>(n_samples);
    const double amp = 1.0 / std::sqrt(f);
    const double angle = 2.0 * std::numbers::pi * detail::unit_uniform(rng);
    spectrum[k] = std::polar(amp, angle);
  }
  if (n_samples % 2 == 0) spectrum[bins - 1] = {spectrum[bins - 1].real(), 0.0};

  auto x = fft::inverse_real(spectrum, n_samples);
  const double scale = std::sqrt(target_power / power(x));
  for (double& v : x) v *= scale;
  return Signal(std::move(x), fs);
}

struct SynthesisSpec {
  double m = 8.0;
  double n = 45.0;
  double ami = 0.25;
  double duration = 10.0;
  double fs = 1000.0;
  double noise_power = 0.0;
  double clean_scale = 1.0;
  std::uint64_t seed = 1;

  std::size_t sample_count() const { return static_cast<std::size_t>(std::llround(duration * fs)); }
};

inline void validate(const SynthesisSpec& spec) {
  detail::require_rate(spec.fs);
  if (!(spec.ami >= 0.0) || !std::isfinite(spec.ami)) fail(ErrorKind::invalid_input, "ami must be >= 0");
  if (!(spec.m > 0.0)) fail(ErrorKind::invalid_input, "modulating frequency must be positive");
  if (!(spec.m < spec.n)) fail(ErrorKind::invalid_input, "modulating frequency must be below the modulated one");
  if (!(spec.n < spec.fs / 2.0)) fail(ErrorKind::invalid_input, "modulated frequency must be below Nyquist");
  if (!(spec.duration > 0.0) || spec.sample_count() < 2)
    fail(ErrorKind::invalid_input, "duration must cover at least 2 samples");
  if (!(spec.noise_power >= 0.0) || !std::isfinite(spec.noise_power))
    fail(ErrorKind::invalid_input, "noise power must be >= 0");
  if (!std::isfinite(spec.clean_scale)) fail(ErrorKind::invalid_input, "clean scale must be finite");
}

struct SynthesisResult {
  Signal composite;
  Signal clean;
  Signal noise;
};

inline SynthesisResult synth_pac(const SynthesisSpec& spec) {
  validate(spec);
  const std::size_t count = spec.sample_count();
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> clean(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) / spec.fs;
    const double slow = std::sin(two_pi * spec.m * t);
    clean[k] = spec.clean_scale * (slow + (0.5 + spec.ami * slow) * std::cos(two_pi * spec.n * t));
  }
  Signal noise = pink_noise(count, spec.fs, spec.noise_power, spec.seed);
  std::vector<double> composite(count);
  for (std::size_t k = 0; k < count; ++k) composite[k] = clean[k] + noise[k];
  return {Signal(std::move(composite), spec.fs), Signal(std::move(clean), spec.fs), std::move(noise)};
}

/// power(clean) / power(noise); +infinity when the noise is silent.
inline double snr(const Signal& clean, const Signal& noise) {
  if (clean.size() != noise.size()) fail(ErrorKind::invalid_input, "clean and noise lengths differ");
  const double pn = power(noise);
  if (pn == 0.0) return std::numeric_limits<double>::infinity();
  return power(clean) / pn;
}

/// Time-averaged power of the unscaled deterministic part over whole cycles:
/// 1/2 from the modulator plus (0.25 + ami^2 / 2) / 2 from the carrier.
inline double unit_clean_power(double ami) { return 0.625 + 0.25 * ami * ami; }

inline double clean_scale_for_power(double target_power, double ami) {
  if (!(target_power >= 0.0)) fail(ErrorKind::invalid_input, "clean power must be >= 0");
  return std::sqrt(target_power / unit_clean_power(ami));
}

struct FrequencyPair {
  int m = 0;
  int n = 0;
  friend bool operator==(const FrequencyPair&, const FrequencyPair&) = default;
};

inline constexpr std::array<FrequencyPair, 4> kBenchmarkPairs{{{8, 45}, {12, 45}, {20, 45}, {30, 45}}};

inline constexpr double kBenchmarkAmi = 0.25;
inline constexpr double kBenchmarkDuration = 10.0;
inline constexpr double kBenchmarkFs = 1000.0;
inline constexpr double kBenchmarkNoisePower = 6250.0;
inline constexpr double kBenchmarkCleanPower = 630.0;

/// One of the four benchmark signals (index 1..4) at the standard powers.
inline SynthesisSpec benchmark_spec(int pair_index, std::uint64_t seed) {
  if (pair_index < 1 || pair_index > static_cast<int>(kBenchmarkPairs.size()))
    fail(ErrorKind::invalid_input, "benchmark pair index must be 1..4");
  const auto pair = kBenchmarkPairs[static_cast<std::size_t>(pair_index - 1)];
  SynthesisSpec spec;
  spec.m = pair.m;
  spec.n = pair.n;
  spec.ami = kBenchmarkAmi;
  spec.duration = kBenchmarkDuration;
  spec.fs = kBenchmarkFs;
  spec.noise_power = kBenchmarkNoisePower;
  spec.clean_scale = clean_scale_for_power(kBenchmarkCleanPower, kBenchmarkAmi);
  spec.seed = seed;
  return spec;
}

}  // namespace pac_lab
