// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pac_lab Authors

#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "pac_lab/signal.hpp"

namespace pac_lab::testing {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline Signal sampled(double duration, double fs, const std::function<double(double)>& f) {
  const auto n = static_cast<std::size_t>(std::llround(duration * fs));
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = f(static_cast<double>(k) / fs);
  return Signal(std::move(x), fs);
}

// Middle 80% of a series.
template <class T>
std::span<const T> interior80(std::span<const T> x) {
  const std::size_t cut = x.size() / 10;
  return x.subspan(cut, x.size() - 2 * cut);
}

inline double rmse(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(acc / static_cast<double>(a.size()));
}

inline double max_abs_dev(std::span<const double> a, double target) {
  double worst = 0.0;
  for (double v : a) worst = std::max(worst, std::abs(v - target));
  return worst;
}

}  // namespace pac_lab::testing
