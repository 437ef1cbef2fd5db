// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pac_lab Authors

#pragma once

// Welch power spectral density and magnitude-squared coherence.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "pac_lab/error.hpp"
#include "pac_lab/fft.hpp"
#include "pac_lab/signal.hpp"

namespace pac_lab {

enum class Taper { hann, rectangular };

struct WelchSpec {
  std::size_t window_len = 4096;
  double overlap = 0.25;
  Taper taper = Taper::hann;
};

enum class SpectrumKind { psd, coherence };

struct Spectrum {
  std::vector<double> freqs;
  std::vector<double> values;
  SpectrumKind kind = SpectrumKind::psd;
  /// Segment length actually used; smaller than requested when clipped.
  std::size_t window_len = 0;
  std::size_t segments = 0;

  bool window_clipped(const WelchSpec& requested) const { return window_len < requested.window_len; }
};

inline void validate(const WelchSpec& spec) {
  if (spec.window_len < 8) fail(ErrorKind::invalid_input, "Welch window must be at least 8 samples");
  if (!(spec.overlap >= 0.0 && spec.overlap < 1.0))
    fail(ErrorKind::invalid_input, "Welch overlap must lie in [0, 1)");
}

namespace detail {

inline std::vector<double> taper_window(Taper taper, std::size_t len) {
  std::vector<double> w(len, 1.0);
  if (taper == Taper::hann)
    for (std::size_t k = 0; k < len; ++k)
      w[k] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(len));
  return w;
}

struct Segmentation {
  std::size_t window_len = 0;
  std::vector<std::size_t> starts;
};

inline Segmentation segment(std::size_t n, const WelchSpec& spec) {
  validate(spec);
  if (n < 8) fail(ErrorKind::signal_too_short, "Welch estimate needs at least 8 samples");
  Segmentation seg;
  seg.window_len = std::min(spec.window_len, n);
  const auto overlap = static_cast<std::size_t>(std::floor(spec.overlap * static_cast<double>(seg.window_len)));
  const std::size_t step = std::max<std::size_t>(1, seg.window_len - overlap);
  for (std::size_t s = 0; s + seg.window_len <= n; s += step) seg.starts.push_back(s);
  return seg;
}

/// Mean-removed, tapered transform of every segment.
inline std::vector<std::vector<cd>> segment_spectra(std::span<const double> x, const Segmentation& seg,
                                                    std::span<const double> window) {
  std::vector<std::vector<cd>> out;
  out.reserve(seg.starts.size());
  std::vector<double> buf(seg.window_len);
  for (std::size_t start : seg.starts) {
    double mean = 0.0;
    for (std::size_t k = 0; k < seg.window_len; ++k) mean += x[start + k];
    mean /= static_cast<double>(seg.window_len);
    for (std::size_t k = 0; k < seg.window_len; ++k) buf[k] = (x[start + k] - mean) * window[k];
    out.push_back(fft::forward_real(buf, seg.window_len));
  }
  return out;
}

inline std::vector<double> bin_freqs(std::size_t window_len, double fs) {
  std::vector<double> f(window_len / 2 + 1);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = static_cast<double>(k) * fs / static_cast<double>(window_len);
  return f;
}

}  // namespace detail

/// One-sided Welch density; integrates (trapezoid over [0, fs/2]) to the
/// mean square of the zero-mean input. Windows longer than the signal are
/// clipped to its length.
inline Spectrum welch_psd(const Signal& x, const WelchSpec& spec = {}) {
  const auto seg = detail::segment(x.size(), spec);
  const auto window = detail::taper_window(spec.taper, seg.window_len);
  double window_energy = 0.0;
  for (double w : window) window_energy += w * w;

  const auto spectra = detail::segment_spectra(x.samples(), seg, window);
  Spectrum out;
  out.kind = SpectrumKind::psd;
  out.window_len = seg.window_len;
  out.segments = spectra.size();
  out.freqs = detail::bin_freqs(seg.window_len, x.fs());
  out.values.assign(out.freqs.size(), 0.0);
  for (const auto& s : spectra)
    for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] += std::norm(s[k]);

  const double scale = 1.0 / (static_cast<double>(spectra.size()) * x.fs() * window_energy);
  const bool even = seg.window_len % 2 == 0;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    const bool unpaired = k == 0 || (even && k == out.values.size() - 1);
    out.values[k] *= scale * (unpaired ? 1.0 : 2.0);
  }
  return out;
}

/// |S_xy|^2 / (S_xx S_yy) per bin over identical segmentation. Bins with no
/// power in either input are 0.
inline Spectrum coherence(const Signal& x, const Signal& y, const WelchSpec& spec) {
  if (x.size() != y.size()) fail(ErrorKind::invalid_input, "coherence inputs differ in length");
  if (x.fs() != y.fs()) fail(ErrorKind::invalid_input, "coherence inputs differ in sampling rate");
  const auto seg = detail::segment(x.size(), spec);
  if (seg.starts.size() < 2)
    fail(ErrorKind::unreliable_estimate, "coherence needs at least 2 Welch segments, got " +
                                             std::to_string(seg.starts.size()));
  const auto window = detail::taper_window(spec.taper, seg.window_len);
  const auto sx = detail::segment_spectra(x.samples(), seg, window);
  const auto sy = detail::segment_spectra(y.samples(), seg, window);

  const std::size_t bins = seg.window_len / 2 + 1;
  std::vector<double> cross_re(bins, 0.0), cross_im(bins, 0.0), pxx(bins, 0.0), pyy(bins, 0.0);
  for (std::size_t s = 0; s < sx.size(); ++s) {
    for (std::size_t k = 0; k < bins; ++k) {
      const double xr = sx[s][k].real(), xi = sx[s][k].imag();
      const double yr = sy[s][k].real(), yi = sy[s][k].imag();
      // Written so that swapping x and y yields bitwise-identical results.
      cross_re[k] += xr * yr + xi * yi;
      cross_im[k] += xr * yi - xi * yr;
      pxx[k] += xr * xr + xi * xi;
      pyy[k] += yr * yr + yi * yi;
    }
  }

  Spectrum out;
  out.kind = SpectrumKind::coherence;
  out.window_len = seg.window_len;
  out.segments = sx.size();
  out.freqs = detail::bin_freqs(seg.window_len, x.fs());
  out.values.assign(bins, 0.0);
  for (std::size_t k = 0; k < bins; ++k) {
    const double den = pxx[k] * pyy[k];
    if (den > 0.0) {
      const double num = cross_re[k] * cross_re[k] + cross_im[k] * cross_im[k];
      out.values[k] = std::clamp(num / den, 0.0, 1.0);
    }
  }
  return out;
}

/// Index of the bin closest to f; ties go to the lower frequency.
inline std::size_t nearest_bin(const Spectrum& s, double f) {
  std::size_t best = 0;
  double best_dist = std::abs(s.freqs.front() - f);
  for (std::size_t k = 1; k < s.freqs.size(); ++k) {
    const double d = std::abs(s.freqs[k] - f);
    if (d < best_dist) {
      best = k;
      best_dist = d;
    }
  }
  return best;
}

/// Trapezoidal integral of the values over the frequency axis.
inline double integrate(const Spectrum& s) {
  double acc = 0.0;
  for (std::size_t k = 1; k < s.freqs.size(); ++k)
    acc += 0.5 * (s.values[k] + s.values[k - 1]) * (s.freqs[k] - s.freqs[k - 1]);
  return acc;
}

}  // namespace pac_lab
