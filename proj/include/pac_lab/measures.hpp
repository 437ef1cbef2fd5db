// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pac_lab Authors

#pragma once

// Phase-amplitude coupling estimators.
//
//   mca  PLV between the phase of a narrow Gabor band at m and the phase of the
//        m-component of the envelope of the three-leg filter output at (m, n).
//   eps  same PLV, with Morlet bands at m and n instead.
//   mvl  |< a_n(t) exp(i phi_m(t)) >|, Morlet bands.
//   cv   coherence between the raw signal and the Morlet envelope at n, read
//        at the bin nearest m.
//   kld  1 - H(P) / log(N) of the amplitude-by-phase distribution over N bins.
//
// Every estimator is written once against a "filter source" (anything with
// input(), gabor(center) and morlet(center)). DirectFilters computes bands on
// demand; the comodulogram supplies a shared cache with the same interface.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pac_lab/error.hpp"
#include "pac_lab/filters.hpp"
#include "pac_lab/signal.hpp"
#include "pac_lab/spectral.hpp"

namespace pac_lab {

struct MeasureConfig {
  /// Width of every Gabor band used by mca, and of the envelope band at m.
  double mca_bw = 1.0;
  double morlet_cycles = 4.0;
  std::size_t kld_bins = 50;
  /// Samples dropped from each end before statistics; automatic when empty.
  std::optional<std::size_t> edge_trim;
  /// Segmentation for the cv coherence estimate (1 s windows at 1 kHz).
  WelchSpec welch{1000, 0.5, Taper::hann};
  double truncation = 4.0;
};

inline void validate(const MeasureConfig& cfg) {
  if (cfg.kld_bins < 2) fail(ErrorKind::invalid_input, "kld_bins must be at least 2");
  if (!(cfg.mca_bw > 0.0)) fail(ErrorKind::invalid_input, "mca_bw must be positive");
  if (!(cfg.morlet_cycles >= 1.0)) fail(ErrorKind::invalid_input, "morlet_cycles must be at least 1");
  if (!(cfg.truncation > 0.0)) fail(ErrorKind::invalid_input, "truncation must be positive");
  validate(cfg.welch);
}

/// A band whose interior RMS is below this fraction of its reference carries
/// only filter leakage and round-off; its phase is treated as undefined.
inline constexpr double kEmptyBandLevel = 1e-4;

// ---------------------------------------------------------------------------
// Elementary statistics

/// Phase locking value |< exp(i (u - v)) >| in [0, 1].
inline double plv(std::span<const double> phase_u, std::span<const double> phase_v) {
  if (phase_u.size() != phase_v.size()) fail(ErrorKind::invalid_input, "plv inputs differ in length");
  if (phase_u.empty()) fail(ErrorKind::invalid_input, "plv needs at least one sample");
  double c = 0.0, s = 0.0;
  for (std::size_t k = 0; k < phase_u.size(); ++k) {
    const double d = phase_u[k] - phase_v[k];
    c += std::cos(d);
    s += std::sin(d);
  }
  const double count = static_cast<double>(phase_u.size());
  return std::min(1.0, std::hypot(c, s) / count);
}

inline double plv(const Signal& phase_u, const Signal& phase_v) { return plv(phase_u.samples(), phase_v.samples()); }

/// |< amp(t) exp(i phase(t)) >|.
inline double mean_vector_length(std::span<const double> phase, std::span<const double> amp) {
  if (phase.size() != amp.size()) fail(ErrorKind::invalid_input, "mvl inputs differ in length");
  if (phase.empty()) fail(ErrorKind::invalid_input, "mvl needs at least one sample");
  double c = 0.0, s = 0.0;
  for (std::size_t k = 0; k < phase.size(); ++k) {
    c += amp[k] * std::cos(phase[k]);
    s += amp[k] * std::sin(phase[k]);
  }
  return std::hypot(c, s) / static_cast<double>(phase.size());
}

struct PhaseAmplitudeDistribution {
  /// Mean amplitude per phase bin, normalized to sum 1.
  std::vector<double> bin_means;
  std::vector<std::size_t> bin_counts;

  std::size_t bins() const noexcept { return bin_means.size(); }
  /// Center of bin l; bins split [-pi, pi) into equal intervals.
  double bin_center(std::size_t l) const {
    const double width = 2.0 * std::numbers::pi / static_cast<double>(bins());
    return -std::numbers::pi + (static_cast<double>(l) + 0.5) * width;
  }
};

inline std::size_t phase_bin(double phase, std::size_t n_bins) {
  const double u = (phase + std::numbers::pi) / (2.0 * std::numbers::pi);
  const auto raw = static_cast<std::ptrdiff_t>(std::floor(u * static_cast<double>(n_bins)));
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(raw, 0, static_cast<std::ptrdiff_t>(n_bins) - 1));
}

inline PhaseAmplitudeDistribution bin_amplitude_by_phase(std::span<const double> phase, std::span<const double> amp,
                                                         std::size_t n_bins) {
  if (phase.size() != amp.size()) fail(ErrorKind::invalid_input, "phase and amplitude differ in length");
  if (n_bins < 2) fail(ErrorKind::invalid_input, "need at least 2 phase bins");
  PhaseAmplitudeDistribution dist;
  dist.bin_means.assign(n_bins, 0.0);
  dist.bin_counts.assign(n_bins, 0);
  for (std::size_t k = 0; k < phase.size(); ++k) {
    const std::size_t b = phase_bin(phase[k], n_bins);
    dist.bin_means[b] += amp[k];
    ++dist.bin_counts[b];
  }
  double total = 0.0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    if (dist.bin_counts[b] > 0) dist.bin_means[b] /= static_cast<double>(dist.bin_counts[b]);
    total += dist.bin_means[b];
  }
  if (!(total > 0.0)) fail(ErrorKind::degenerate_distribution, "total amplitude is zero");
  for (double& v : dist.bin_means) v /= total;
  return dist;
}

/// Shannon entropy -sum P log P (natural log, 0 log 0 = 0).
inline double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

/// 1 - H(P) / log(N): 0 for a uniform distribution, 1 for a single occupied bin.
inline double kld_from_distribution(const PhaseAmplitudeDistribution& dist) {
  const double n = static_cast<double>(dist.bins());
  return std::clamp(1.0 - entropy(dist.bin_means) / std::log(n), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Band phase helpers

namespace detail {

inline double rms(std::span<const double> x) { return std::sqrt(power(x)); }

inline std::span<const double> interior(std::span<const double> x, std::size_t trim) {
  return x.subspan(trim, x.size() - 2 * trim);
}

inline std::vector<double> modulus(std::span<const cd> z) {
  std::vector<double> a(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) a[k] = std::abs(z[k]);
  return a;
}

inline void require_trim(std::size_t trim, std::size_t n) {
  if (2 * trim >= n)
    fail(ErrorKind::empty_result, "edge trim of " + std::to_string(trim) + " samples leaves nothing of " +
                                      std::to_string(n));
}

inline void require_band(std::span<const double> band, double reference_rms, std::size_t trim) {
  const double level = rms(interior(band, trim));
  if (!(level > 0.0) || level < kEmptyBandLevel * reference_rms)
    fail(ErrorKind::degenerate_phase, "band carries no signal");
}

/// Phase of a real band signal, after checking it is not empty.
inline Signal real_band_phase(const Signal& band, double reference_rms, std::size_t trim) {
  require_band(band.samples(), reference_rms, trim);
  return phase(analytic(band));
}

/// Phase of a complex (Morlet) band, after checking it is not empty.
inline Signal complex_band_phase(const ComplexSeries& band, double reference_rms, std::size_t trim) {
  const auto mag = modulus(band.values());
  require_band(mag, reference_rms, trim);
  return phase(band);
}

/// Phase of the m-component of an amplitude envelope: mean of [trim, N - trim)
/// removed, Gabor band at m, analytic phase. Emptiness is judged on the same
/// interior.
inline Signal envelope_band_phase(const Signal& env, double m, double bw, double truncation, std::size_t trim) {
  const auto s = env.samples();
  const auto inner = interior(s, trim);
  const double mean = std::accumulate(inner.begin(), inner.end(), 0.0) / static_cast<double>(inner.size());
  std::vector<double> centered(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) centered[k] = s[k] - mean;
  const Signal filtered = bandpass(Signal(std::move(centered), env.fs()), FilterSpec::constant(m, bw, truncation));
  return real_band_phase(filtered, rms(inner), trim);
}

}  // namespace detail

/// Phase of the m-component of an envelope (mean removed, Gabor band at m).
/// A constant envelope has no such component: degenerate-phase error.
inline Signal envelope_phase(const Signal& env, double m, double bw = 1.0, double truncation = 4.0) {
  return detail::envelope_band_phase(env, m, bw, truncation, 0);
}

// ---------------------------------------------------------------------------
// Edge trims

inline std::size_t gabor_half_length(double bw_hz, double truncation, double fs) {
  return detail::half_taps(envelope_sigma(FilterSpec::constant(1.0, bw_hz)), truncation, fs);
}

inline std::size_t morlet_half_length(double center, double cycles, double truncation, double fs) {
  return detail::half_taps(envelope_sigma(FilterSpec::proportional(center, cycles)), truncation, fs);
}

// Defaults cover the longest chain of filters feeding the statistic: a
// transient entering the first band-pass travels one more half-length through
// the envelope band-pass.

inline std::size_t mca_edge_trim(double fs, const MeasureConfig& cfg) {
  if (cfg.edge_trim) return *cfg.edge_trim;
  return 2 * gabor_half_length(cfg.mca_bw, cfg.truncation, fs);
}

inline std::size_t eps_edge_trim(double m, double n, double fs, const MeasureConfig& cfg) {
  if (cfg.edge_trim) return *cfg.edge_trim;
  return std::max(morlet_half_length(m, cfg.morlet_cycles, cfg.truncation, fs),
                  morlet_half_length(n, cfg.morlet_cycles, cfg.truncation, fs) +
                      gabor_half_length(cfg.mca_bw, cfg.truncation, fs));
}

inline std::size_t morlet_pair_edge_trim(double m, double n, double fs, const MeasureConfig& cfg) {
  if (cfg.edge_trim) return *cfg.edge_trim;
  return std::max(morlet_half_length(m, cfg.morlet_cycles, cfg.truncation, fs),
                  morlet_half_length(n, cfg.morlet_cycles, cfg.truncation, fs));
}

inline std::size_t cv_edge_trim(double n, double fs, const MeasureConfig& cfg) {
  if (cfg.edge_trim) return *cfg.edge_trim;
  return morlet_half_length(n, cfg.morlet_cycles, cfg.truncation, fs);
}

// ---------------------------------------------------------------------------
// Filter sources

/// Computes every band on request; nothing is retained.
class DirectFilters {
 public:
  DirectFilters(const Signal& x, const MeasureConfig& cfg) : x_(x), cfg_(cfg) {}

  const Signal& input() const noexcept { return x_; }

  std::shared_ptr<const Signal> gabor(double center) const {
    return std::make_shared<const Signal>(bandpass(x_, FilterSpec::constant(center, cfg_.mca_bw, cfg_.truncation)));
  }

  std::shared_ptr<const ComplexSeries> morlet(double center) const {
    return std::make_shared<const ComplexSeries>(morlet_bandpass(x_, center, cfg_.morlet_cycles, cfg_.truncation));
  }

 private:
  const Signal& x_;
  const MeasureConfig& cfg_;
};

namespace detail {

inline void require_morlet_pair(double m, double n, double fs) {
  if (!(m >= 1.0)) fail(ErrorKind::out_of_band, "modulating frequency must be at least 1 Hz");
  if (!(n < fs / 2.0)) fail(ErrorKind::out_of_band, "modulated frequency must be below Nyquist");
}

template <class Source>
double mca_cell(const Source& src, double m, double n, const MeasureConfig& cfg) {
  const Signal& x = src.input();
  require_triplet_bands(m, n, x.fs());
  const std::size_t trim = mca_edge_trim(x.fs(), cfg);
  require_trim(trim, x.size());

  const auto slow = src.gabor(m);
  const auto lower = src.gabor(n - m);
  const auto center = src.gabor(n);
  const auto upper = src.gabor(n + m);
  const Signal tri = triplet_sum(*lower, *center, *upper);

  try {
    require_band(tri.samples(), rms(x.samples()), trim);
    const Signal env = amplitude(analytic(tri));
    const Signal slow_phase = real_band_phase(*slow, rms(x.samples()), trim);
    const Signal env_phase = envelope_band_phase(env, m, cfg.mca_bw, cfg.truncation, trim);
    return plv(interior(slow_phase.samples(), trim), interior(env_phase.samples(), trim));
  } catch (const PacError& e) {
    if (e.kind() == ErrorKind::degenerate_phase) return 0.0;
    throw;
  }
}

template <class Source>
double eps_cell(const Source& src, double m, double n, const MeasureConfig& cfg) {
  const Signal& x = src.input();
  require_morlet_pair(m, n, x.fs());
  const std::size_t trim = eps_edge_trim(m, n, x.fs(), cfg);
  require_trim(trim, x.size());

  const auto slow = src.morlet(m);
  const auto fast = src.morlet(n);
  const Signal env(modulus(fast->values()), x.fs());
  try {
    require_band(env.samples(), rms(x.samples()), trim);
    const Signal slow_phase = complex_band_phase(*slow, rms(x.samples()), trim);
    const Signal env_phase = envelope_band_phase(env, m, cfg.mca_bw, cfg.truncation, trim);
    return plv(interior(slow_phase.samples(), trim), interior(env_phase.samples(), trim));
  } catch (const PacError& e) {
    if (e.kind() == ErrorKind::degenerate_phase) return 0.0;
    throw;
  }
}

template <class Source>
double mvl_cell(const Source& src, double m, double n, const MeasureConfig& cfg) {
  const Signal& x = src.input();
  require_morlet_pair(m, n, x.fs());
  const std::size_t trim = morlet_pair_edge_trim(m, n, x.fs(), cfg);
  require_trim(trim, x.size());

  const auto slow = src.morlet(m);
  const auto fast = src.morlet(n);
  const auto amp = modulus(fast->values());
  try {
    const Signal slow_phase = complex_band_phase(*slow, rms(x.samples()), trim);
    return mean_vector_length(interior(slow_phase.samples(), trim), interior(amp, trim));
  } catch (const PacError& e) {
    if (e.kind() == ErrorKind::degenerate_phase) return 0.0;
    throw;
  }
}

/// Coherence between the trimmed raw signal and the trimmed Morlet envelope
/// at n. Depends on n only, which lets a comodulogram reuse it along a row.
/// Empty when the envelope band carries no signal.
template <class Source>
std::optional<Spectrum> cv_spectrum(const Source& src, double n, const MeasureConfig& cfg) {
  const Signal& x = src.input();
  require_morlet_pair(1.0, n, x.fs());
  const std::size_t trim = cv_edge_trim(n, x.fs(), cfg);
  require_trim(trim, x.size());

  const auto fast = src.morlet(n);
  const auto amp = modulus(fast->values());
  if (rms(interior(amp, trim)) < kEmptyBandLevel * rms(x.samples())) return std::nullopt;
  const auto xs = interior(x.samples(), trim);
  const auto as = interior(amp, trim);
  return coherence(Signal(std::vector<double>(xs.begin(), xs.end()), x.fs()),
                   Signal(std::vector<double>(as.begin(), as.end()), x.fs()), cfg.welch);
}

inline double cv_from_spectrum(const std::optional<Spectrum>& spectrum, double m) {
  if (!spectrum) return 0.0;
  return spectrum->values[nearest_bin(*spectrum, m)];
}

template <class Source>
double cv_cell(const Source& src, double m, double n, const MeasureConfig& cfg) {
  require_morlet_pair(m, n, src.input().fs());
  return cv_from_spectrum(cv_spectrum(src, n, cfg), m);
}

template <class Source>
double kld_cell(const Source& src, double m, double n, const MeasureConfig& cfg) {
  const Signal& x = src.input();
  require_morlet_pair(m, n, x.fs());
  const std::size_t trim = morlet_pair_edge_trim(m, n, x.fs(), cfg);
  require_trim(trim, x.size());

  const auto slow = src.morlet(m);
  const auto fast = src.morlet(n);
  const auto amp = modulus(fast->values());
  std::optional<Signal> slow_phase;
  try {
    slow_phase = complex_band_phase(*slow, rms(x.samples()), trim);
  } catch (const PacError& e) {
    if (e.kind() == ErrorKind::degenerate_phase) return 0.0;
    throw;
  }
  if (rms(interior(amp, trim)) < kEmptyBandLevel * rms(x.samples()))
    fail(ErrorKind::degenerate_distribution, "amplitude band carries no signal");
  const auto dist = bin_amplitude_by_phase(interior(slow_phase->samples(), trim), interior(amp, trim), cfg.kld_bins);
  return kld_from_distribution(dist);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Public estimators. Empty bands give 0; out-of-band (m, n) throws.

inline double mca_pac(const Signal& x, double m, double n, const MeasureConfig& cfg = {}) {
  validate(cfg);
  return detail::mca_cell(DirectFilters(x, cfg), m, n, cfg);
}

inline double eps(const Signal& x, double m, double n, const MeasureConfig& cfg = {}) {
  validate(cfg);
  return detail::eps_cell(DirectFilters(x, cfg), m, n, cfg);
}

inline double mvl(const Signal& x, double m, double n, const MeasureConfig& cfg = {}) {
  validate(cfg);
  return detail::mvl_cell(DirectFilters(x, cfg), m, n, cfg);
}

inline double cv(const Signal& x, double m, double n, const MeasureConfig& cfg = {}) {
  validate(cfg);
  return detail::cv_cell(DirectFilters(x, cfg), m, n, cfg);
}

/// Throws degenerate-distribution when the Morlet envelope at n is all zero.
inline double kld(const Signal& x, double m, double n, const MeasureConfig& cfg = {}) {
  validate(cfg);
  return detail::kld_cell(DirectFilters(x, cfg), m, n, cfg);
}

}  // namespace pac_lab
