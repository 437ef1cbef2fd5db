// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pac_lab Authors

#pragma once

// Detection benchmark: synthesize coupled signals for a set of frequency
// pairs and seeds, compute a comodulogram per method, and score how far each
// matrix peak lands from the true pair.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "pac_lab/comodulogram.hpp"
#include "pac_lab/synthesis.hpp"

namespace pac_lab {

struct ComparisonSpec {
  std::vector<FrequencyPair> pairs{kBenchmarkPairs.begin(), kBenchmarkPairs.end()};
  std::vector<std::uint64_t> seeds{1};
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  double ami = kBenchmarkAmi;
  double duration = kBenchmarkDuration;
  double fs = kBenchmarkFs;
  double noise_power = kBenchmarkNoisePower;
  double clean_power = kBenchmarkCleanPower;
  GridSpec grid{};
  MeasureConfig config{};
  /// Retain every matrix in the report (memory grows with runs).
  bool keep_matrices = false;
};

struct PacRun {
  FrequencyPair pair;
  Method method = Method::mca;
  std::uint64_t seed = 0;
  std::optional<Peak> peak;
  double error = 0.0;
};

struct MethodSummary {
  FrequencyPair pair;
  Method method = Method::mca;
  std::size_t runs = 0;
  double mean_error = 0.0;
  double median_error = 0.0;
  double max_error = 0.0;
  /// Runs whose peak is within 1 Hz of the truth on both axes.
  std::size_t within_one_hz = 0;
};

struct PacReport {
  /// Ordered by pair, then seed, then method as listed in the spec.
  std::vector<PacRun> runs;
  std::vector<MethodSummary> summaries;
  /// Normalized matrices parallel to `runs`; filled when keep_matrices is set.
  std::vector<std::optional<PacMatrix>> matrices;
};

inline SynthesisSpec comparison_signal_spec(const ComparisonSpec& spec, FrequencyPair pair, std::uint64_t seed) {
  SynthesisSpec s;
  s.m = pair.m;
  s.n = pair.n;
  s.ami = spec.ami;
  s.duration = spec.duration;
  s.fs = spec.fs;
  s.noise_power = spec.noise_power;
  s.clean_scale = spec.clean_power > 0.0 ? clean_scale_for_power(spec.clean_power, spec.ami) : 1.0;
  s.seed = seed;
  return s;
}

inline std::vector<MethodSummary> summarize(const std::vector<PacRun>& runs, const ComparisonSpec& spec) {
  std::vector<MethodSummary> out;
  for (const auto& pair : spec.pairs)
    for (Method method : spec.methods) {
      MethodSummary s;
      s.pair = pair;
      s.method = method;
      std::vector<double> errors;
      for (const auto& r : runs)
        if (r.pair == pair && r.method == method) {
          errors.push_back(r.error);
          if (within_one_hz(r.peak, pair)) ++s.within_one_hz;
        }
      s.runs = errors.size();
      if (!errors.empty()) {
        double sum = 0.0;
        for (double e : errors) sum += e;
        s.mean_error = sum / static_cast<double>(errors.size());
        std::sort(errors.begin(), errors.end());
        const std::size_t mid = errors.size() / 2;
        s.median_error = errors.size() % 2 ? errors[mid] : 0.5 * (errors[mid - 1] + errors[mid]);
        s.max_error = errors.back();
      }
      out.push_back(s);
    }
  return out;
}

/// Runs every (pair, seed) unit on up to `jobs` threads; the methods of one
/// unit share a filter cache. Output order does not depend on `jobs`.
inline PacReport run_comparison(const ComparisonSpec& spec, unsigned jobs = 1) {
  if (spec.pairs.empty()) fail(ErrorKind::invalid_input, "no frequency pairs given");
  if (spec.seeds.empty()) fail(ErrorKind::invalid_input, "no seeds given");
  if (spec.methods.empty()) fail(ErrorKind::invalid_input, "no methods given");
  for (const auto& pair : spec.pairs) validate(comparison_signal_spec(spec, pair, 0));

  const std::size_t units = spec.pairs.size() * spec.seeds.size();
  const std::size_t per_unit = spec.methods.size();
  std::vector<PacRun> runs(units * per_unit);
  std::vector<std::optional<PacMatrix>> matrices(spec.keep_matrices ? runs.size() : 0);
  detail::parallel_for(units, jobs, [&](std::size_t u) {
    const auto& pair = spec.pairs[u / spec.seeds.size()];
    const auto seed = spec.seeds[u % spec.seeds.size()];
    const auto signal = synth_pac(comparison_signal_spec(spec, pair, seed)).composite;
    const FilterCache cache(signal, spec.config);
    for (std::size_t k = 0; k < per_unit; ++k) {
      const Method method = spec.methods[k];
      auto mat = compute_matrix(cache, method, spec.grid);
      const auto peak = argmax(mat);
      runs[u * per_unit + k] = PacRun{pair, method, seed, peak, localization_error(peak, pair)};
      if (spec.keep_matrices) matrices[u * per_unit + k] = normalize(std::move(mat));
    }
  });
  auto summaries = summarize(runs, spec);
  return {std::move(runs), std::move(summaries), std::move(matrices)};
}

}  // namespace pac_lab
