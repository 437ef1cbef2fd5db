// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pac_lab Authors

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <random>

#include "pac_lab/filters.hpp"
#include "support.hpp"

using namespace pac_lab;
using namespace pac_lab::testing;
using Catch::Approx;

namespace {

constexpr double kFs = 1000.0;

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const PacError& e) {
    return e.kind();
  }
  FAIL("expected a PacError");
  return ErrorKind::io;
}

// Full width between the two points where |H| crosses level (bisection on each side).
double measured_width(const Kernel& k, double center, double level) {
  auto cross = [&](double lo, double hi) {
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      ((std::abs(k.response(mid)) > level) == (std::abs(k.response(lo)) > level) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double span = center * 0.95;
  return cross(center, center + span) - cross(center - span, center);
}

}  // namespace

TEST_CASE("gabor kernel construction") {
  const auto spec = FilterSpec::constant(45.0, 1.0);
  const auto k = gabor_kernel(spec, kFs);
  const double sigma = envelope_sigma(spec);
  CHECK(k.size() % 2 == 1);
  CHECK(k.half_length() == static_cast<std::size_t>(std::floor(4.0 * sigma * kFs)));
  CHECK(static_cast<double>(k.size() - 1) / kFs == Approx(8.0 * sigma).margin(2.0 / kFs));
  const auto taps = k.real_taps();
  for (std::size_t j = 0; j < taps.size(); ++j) REQUIRE(taps[j] == taps[taps.size() - 1 - j]);
  for (const cd& v : k.taps()) REQUIRE(v.imag() == 0.0);
}

TEST_CASE("gabor magnitude response") {
  const auto k = gabor_kernel(FilterSpec::constant(45.0, 1.0), kFs);
  CHECK(std::abs(k.response(45.0)) == Approx(1.0).margin(1e-6));
  // Half magnitude at center +/- bw/2.
  CHECK(std::abs(k.response(44.5)) == Approx(0.5).margin(0.02));
  CHECK(std::abs(k.response(45.5)) == Approx(0.5).margin(0.02));
}

TEST_CASE("gabor stopband at 8 Hz offset") {
  const auto k4 = gabor_kernel(FilterSpec::constant(45.0, 1.0, 4.0), kFs);
  const double mag4 = std::abs(k4.response(37.0));
  // At 4 sigma the truncation step leaks a few 1e-6 in magnitude; the power gain is far below 1e-6.
  CHECK(mag4 * mag4 < 1e-6);
  CHECK(mag4 < 5e-6);
  const auto k5 = gabor_kernel(FilterSpec::constant(45.0, 1.0, 5.0), kFs);
  CHECK(std::abs(k5.response(37.0)) < 1e-6);
}

TEST_CASE("constant bandwidth is independent of the center") {
  for (double c : {5.0, 10.0, 25.0, 45.0, 70.0, 100.0}) {
    const auto k = gabor_kernel(FilterSpec::constant(c, 1.0), kFs);
    CAPTURE(c);
    CHECK(measured_width(k, c, 0.5) == Approx(1.0).epsilon(0.05));
  }
  const auto wide = gabor_kernel(FilterSpec::constant(45.0, 4.0), kFs);
  CHECK(measured_width(wide, 45.0, 0.5) == Approx(4.0).epsilon(0.05));
}

TEST_CASE("gabor kernel errors") {
  CHECK(kind_of([] { gabor_kernel(FilterSpec::constant(500.0, 1.0), kFs); }) == ErrorKind::aliasing);
  CHECK(kind_of([] { gabor_kernel(FilterSpec::constant(0.0, 1.0), kFs); }) == ErrorKind::invalid_input);
  CHECK(kind_of([] { gabor_kernel(FilterSpec::constant(10.0, 0.0), kFs); }) == ErrorKind::invalid_input);
  CHECK(kind_of([] { gabor_kernel(FilterSpec::proportional(10.0, 0.5), kFs); }) == ErrorKind::invalid_input);
}

TEST_CASE("bandpass passes the center tone and rejects distant ones") {
  const auto x = sampled(10.0, kFs, [](double t) { return std::cos(kTwoPi * 45.0 * t) + std::cos(kTwoPi * 10.0 * t); });
  const auto ref = sampled(10.0, kFs, [](double t) { return std::cos(kTwoPi * 45.0 * t); });
  const auto y = bandpass(x, FilterSpec::constant(45.0, 1.0));
  REQUIRE(y.size() == x.size());
  CHECK(rmse(interior80(y.samples()), interior80(ref.samples())) < 0.02);

  // 20 s so the interior 80% lies beyond the 1.5 s kernel half-length at both ends.
  const auto long_tone = sampled(20.0, kFs, [](double t) { return std::cos(kTwoPi * 45.0 * t); });
  const auto off = bandpass(long_tone, FilterSpec::constant(8.0, 1.0));
  CHECK(max_abs_dev(interior80(off.samples()), 0.0) < 1e-4);

  const auto zeros = bandpass(Signal(std::vector<double>(5000, 0.0), kFs), FilterSpec::constant(45.0, 1.0));
  for (double v : zeros.samples()) REQUIRE(v == 0.0);
}

TEST_CASE("bandpass is linear") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  std::vector<double> a(6000), b(6000), mix(6000);
  for (std::size_t k = 0; k < a.size(); ++k) {
    a[k] = g(rng);
    b[k] = g(rng);
    mix[k] = 2.5 * a[k] - 0.75 * b[k];
  }
  const auto kern = gabor_kernel(FilterSpec::constant(30.0, 1.0), kFs);
  const auto ya = bandpass(Signal(a, kFs), kern);
  const auto yb = bandpass(Signal(b, kFs), kern);
  const auto ym = bandpass(Signal(mix, kFs), kern);
  double scale = 0.0;
  for (double v : ym.samples()) scale = std::max(scale, std::abs(v));
  for (std::size_t k = 0; k < ym.size(); ++k) REQUIRE(std::abs(ym[k] - (2.5 * ya[k] - 0.75 * yb[k])) <= 1e-9 * scale);
}

TEST_CASE("bandpass is zero phase") {
  const auto x = sampled(10.0, kFs, [](double t) { return std::cos(kTwoPi * 20.0 * t); });
  const auto y = bandpass(x, FilterSpec::constant(20.0, 1.0));
  const auto xi = interior80(x.samples());
  const auto yi = interior80(y.samples());
  int best_lag = 99;
  double best = -1e300;
  for (int lag = -10; lag <= 10; ++lag) {
    double acc = 0.0;
    for (std::size_t k = 20; k + 20 < xi.size(); ++k) acc += xi[k] * yi[static_cast<std::size_t>(static_cast<int>(k) + lag)];
    if (acc > best) {
      best = acc;
      best_lag = lag;
    }
  }
  CHECK(best_lag == 0);
}

TEST_CASE("bandpass needs a signal at least as long as the kernel") {
  const Signal x(std::vector<double>(1000, 1.0), kFs);
  CHECK(kind_of([&] { bandpass(x, FilterSpec::constant(45.0, 1.0)); }) == ErrorKind::signal_too_short);
}

TEST_CASE("morlet bandpass of a tone at the center") {
  const auto x = sampled(10.0, kFs, [](double t) { return std::cos(kTwoPi * 45.0 * t); });
  const auto z = morlet_bandpass(x, 45.0, 4.0);
  const auto a = amplitude(z);
  const auto in = interior80(a.samples());
  const double mean = std::accumulate(in.begin(), in.end(), 0.0) / static_cast<double>(in.size());
  CHECK(mean == Approx(1.0).epsilon(1e-3));
  CHECK(max_abs_dev(in, mean) < 0.02 * mean);
  // Argument tracks the tone's phase.
  const auto p = phase(z);
  for (std::size_t k = 1000; k < 9000; k += 97) REQUIRE(wrap_phase(p[k] - kTwoPi * 45.0 * x.time(k)) == Approx(0.0).margin(1e-3));

  const auto zz = morlet_bandpass(Signal(std::vector<double>(2000, 0.0), kFs), 45.0, 4.0);
  for (std::size_t k = 0; k < zz.size(); ++k) REQUIRE(zz[k] == cd{});
}

TEST_CASE("morlet response width follows the cycle count") {
  const auto k = morlet_kernel(45.0, 4.0, kFs);
  CHECK(std::abs(k.response(45.0)) == Approx(2.0).epsilon(1e-9));
  // Gaussian response with sigma_f = center / cycles = 11.25 Hz.
  const double sigma_f = 45.0 / 4.0;
  const double half_power_width = 2.0 * sigma_f * std::sqrt(std::log(2.0));
  const double half_magnitude_width = 2.0 * sigma_f * std::sqrt(2.0 * std::log(2.0));
  CHECK(half_power_width == Approx(18.73).epsilon(1e-3));
  CHECK(measured_width(k, 45.0, 2.0 / std::sqrt(2.0)) == Approx(half_power_width).epsilon(0.05));
  CHECK(measured_width(k, 45.0, 1.0) == Approx(half_magnitude_width).epsilon(0.05));
}

TEST_CASE("triplet reconstructs the AM envelope") {
  const auto x = sampled(10.0, kFs, [](double t) {
    return (0.5 + 0.25 * std::sin(kTwoPi * 8.0 * t)) * std::cos(kTwoPi * 45.0 * t);
  });
  const auto ref = sampled(10.0, kFs, [](double t) { return 1.0 + 0.25 * std::sin(kTwoPi * 8.0 * t); });
  const auto env = amplitude(analytic(triplet(x, 8.0, 45.0)));
  CHECK(rmse(interior80(env.samples()), interior80(ref.samples())) < 0.02);

  const auto in = interior80(env.samples());
  const auto [lo, hi] = std::minmax_element(in.begin(), in.end());
  // Absolute oscillation 0.25; relative to the doubled carrier the depth equals the input's AMI.
  CHECK((*hi - *lo) / 2.0 == Approx(0.25).epsilon(0.05));
}

TEST_CASE("triplet of a pure carrier has a flat envelope") {
  const auto x = sampled(10.0, kFs, [](double t) { return std::cos(kTwoPi * 45.0 * t); });
  const auto env = amplitude(analytic(triplet(x, 8.0, 45.0)));
  const auto in = interior80(env.samples());
  CHECK(max_abs_dev(in, 2.0) < 0.02 * 2.0);
}

TEST_CASE("triplet band checks") {
  const auto x = sampled(10.0, kFs, [](double t) { return std::cos(kTwoPi * 45.0 * t); });
  CHECK(kind_of([&] { triplet(x, 8.0, 8.0); }) == ErrorKind::out_of_band);
  CHECK(kind_of([&] { triplet(x, 0.5, 8.0); }) == ErrorKind::out_of_band);
  CHECK(kind_of([&] { triplet(x, 260.0, 300.0); }) == ErrorKind::out_of_band);
  CHECK_NOTHROW(triplet(x, 7.0, 8.0));
}

TEST_CASE("reflection padding mirrors about the end samples") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const auto p = detail::reflect_pad(x, 2);
  CHECK(p == std::vector<double>{3, 2, 1, 2, 3, 4, 5, 4, 3});
}
