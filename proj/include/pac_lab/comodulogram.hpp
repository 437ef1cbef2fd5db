// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pac_lab Authors

#pragma once

// Comodulograms: any coupling measure evaluated over an integer (m, n) grid.
//
// Only m < n is meaningful; every other cell is 0, as are cells whose bands do
// not fit below Nyquist and cells whose bands are empty. Band-filtered copies
// of the input are shared between cells through FilterCache, so a full mca
// matrix needs one Gabor filtering per distinct center instead of three per
// cell.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "pac_lab/error.hpp"
#include "pac_lab/filters.hpp"
#include "pac_lab/measures.hpp"
#include "pac_lab/signal.hpp"
#include "pac_lab/synthesis.hpp"

namespace pac_lab {

enum class Method { mca, eps, mvl, cv, kld };

inline constexpr std::array<Method, 5> kAllMethods{Method::mca, Method::eps, Method::mvl, Method::cv, Method::kld};

inline std::string_view to_string(Method method) {
  switch (method) {
    case Method::mca: return "mca";
    case Method::eps: return "eps";
    case Method::mvl: return "mvl";
    case Method::cv: return "cv";
    case Method::kld: return "kld";
  }
  return "unknown";
}

inline Method parse_method(std::string_view name) {
  for (Method m : kAllMethods)
    if (to_string(m) == name) return m;
  fail(ErrorKind::invalid_method, "unknown method '" + std::string(name) + "'");
}

/// Inclusive integer-Hz ranges for the modulating (m) and modulated (n) axes.
struct GridSpec {
  int m_min = 1;
  int m_max = 50;
  int n_min = 1;
  int n_max = 50;

  std::size_t m_count() const { return static_cast<std::size_t>(m_max - m_min + 1); }
  std::size_t n_count() const { return static_cast<std::size_t>(n_max - n_min + 1); }
  bool contains(int m, int n) const { return m >= m_min && m <= m_max && n >= n_min && n <= n_max; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

inline void validate(const GridSpec& grid, double fs) {
  if (grid.m_min < 1 || grid.n_min < 1) fail(ErrorKind::invalid_input, "grid frequencies start at 1 Hz");
  if (grid.m_max < grid.m_min || grid.n_max < grid.n_min) fail(ErrorKind::invalid_input, "empty grid range");
  if (!(grid.n_max < fs / 2.0) || !(grid.m_max < fs / 2.0))
    fail(ErrorKind::invalid_input, "grid extends to or beyond Nyquist");
}

struct Peak {
  int m = 0;
  int n = 0;
  double value = 0.0;
  friend bool operator==(const Peak&, const Peak&) = default;
};

/// Rows are modulated frequencies n (ascending), columns modulating m.
class PacMatrix {
 public:
  PacMatrix(GridSpec grid, Method method, MeasureConfig config = {})
      : grid_(grid), method_(method), config_(std::move(config)), values_(grid.m_count() * grid.n_count(), 0.0) {}

  const GridSpec& grid() const noexcept { return grid_; }
  Method method() const noexcept { return method_; }
  const MeasureConfig& config() const noexcept { return config_; }
  bool normalized() const noexcept { return normalized_; }
  void set_normalized(bool flag) noexcept { normalized_ = flag; }

  double at(int m, int n) const { return values_[index(m, n)]; }
  double& at(int m, int n) { return values_[index(m, n)]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  double max_value() const { return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end()); }

 private:
  std::size_t index(int m, int n) const {
    if (!grid_.contains(m, n)) fail(ErrorKind::invalid_input, "cell outside grid");
    return static_cast<std::size_t>(n - grid_.n_min) * grid_.m_count() + static_cast<std::size_t>(m - grid_.m_min);
  }

  GridSpec grid_;
  Method method_;
  MeasureConfig config_;
  bool normalized_ = false;
  std::vector<double> values_;
};

/// Shared store of band-filtered copies of one input, keyed by filter family,
/// center and width. Safe for concurrent readers; two threads racing to fill
/// the same entry both compute it and the later (identical) result is kept.
class FilterCache {
 public:
  FilterCache(const Signal& x, MeasureConfig cfg) : x_(x), cfg_(std::move(cfg)) { validate(cfg_); }

  FilterCache(const FilterCache&) = delete;
  FilterCache& operator=(const FilterCache&) = delete;

  const Signal& input() const noexcept { return x_; }
  const MeasureConfig& config() const noexcept { return cfg_; }

  std::shared_ptr<const Signal> gabor(double center) const {
    return lookup(gabor_, Key{center, cfg_.mca_bw, cfg_.truncation}, [&] {
      return bandpass(x_, FilterSpec::constant(center, cfg_.mca_bw, cfg_.truncation));
    });
  }

  std::shared_ptr<const ComplexSeries> morlet(double center) const {
    return lookup(morlet_, Key{center, cfg_.morlet_cycles, cfg_.truncation},
                  [&] { return morlet_bandpass(x_, center, cfg_.morlet_cycles, cfg_.truncation); });
  }

  /// Number of filterings actually performed (cache misses, races included).
  std::size_t filterings() const noexcept { return filterings_.load(); }
  std::size_t gabor_entries() const {
    std::shared_lock lock(mutex_);
    return gabor_.size();
  }
  std::size_t morlet_entries() const {
    std::shared_lock lock(mutex_);
    return morlet_.size();
  }

 private:
  using Key = std::tuple<double, double, double>;

  template <class T, class Fn>
  std::shared_ptr<const T> lookup(std::map<Key, std::shared_ptr<const T>>& store, const Key& key, Fn&& compute) const {
    {
      std::shared_lock lock(mutex_);
      if (auto it = store.find(key); it != store.end()) return it->second;
    }
    auto value = std::make_shared<const T>(compute());
    filterings_.fetch_add(1);
    std::unique_lock lock(mutex_);
    store.insert_or_assign(key, value);
    return value;
  }

  const Signal& x_;
  MeasureConfig cfg_;
  mutable std::shared_mutex mutex_;
  mutable std::map<Key, std::shared_ptr<const Signal>> gabor_;
  mutable std::map<Key, std::shared_ptr<const ComplexSeries>> morlet_;
  mutable std::atomic<std::size_t> filterings_{0};
};

struct ComputeOptions {
  bool use_cache = true;
  unsigned jobs = 1;
};

namespace detail {

inline bool zero_cell_error(ErrorKind kind) {
  return kind == ErrorKind::out_of_band || kind == ErrorKind::degenerate_phase ||
         kind == ErrorKind::degenerate_distribution;
}

template <class Source>
double evaluate_cell(const Source& src, Method method, int m, int n, const MeasureConfig& cfg) {
  const double fm = m, fn = n;
  switch (method) {
    case Method::mca: return mca_cell(src, fm, fn, cfg);
    case Method::eps: return eps_cell(src, fm, fn, cfg);
    case Method::mvl: return mvl_cell(src, fm, fn, cfg);
    case Method::cv: return cv_cell(src, fm, fn, cfg);
    case Method::kld: return kld_cell(src, fm, fn, cfg);
  }
  return 0.0;
}

/// Runs body(i) for i in [0, count) on up to `jobs` threads. The first
/// exception thrown by any task is rethrown after all threads finish.
template <class Body>
void parallel_for(std::size_t count, unsigned jobs, Body&& body) {
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  if (workers == 1) {
    run();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
  }
  if (error) std::rethrow_exception(error);
}

/// Per-row coherence spectra for cv, filled on first use.
class CoherenceRows {
 public:
  std::optional<Spectrum> get(int n, const FilterCache& cache) {
    {
      std::lock_guard lock(mutex_);
      if (auto it = rows_.find(n); it != rows_.end()) return it->second;
    }
    auto spectrum = cv_spectrum(cache, static_cast<double>(n), cache.config());
    std::lock_guard lock(mutex_);
    rows_.insert_or_assign(n, spectrum);
    return spectrum;
  }

 private:
  std::mutex mutex_;
  std::map<int, std::optional<Spectrum>> rows_;
};

}  // namespace detail

/// Evaluates `method` on every m < n cell of the grid using (and filling) a
/// caller-owned cache. Unnormalized.
inline PacMatrix compute_matrix(const FilterCache& cache, Method method, const GridSpec& grid, unsigned jobs = 1) {
  const Signal& x = cache.input();
  const MeasureConfig& cfg = cache.config();
  validate(grid, x.fs());

  std::vector<std::pair<int, int>> cells;
  for (int n = grid.n_min; n <= grid.n_max; ++n)
    for (int m = grid.m_min; m <= std::min(grid.m_max, n - 1); ++m) cells.emplace_back(m, n);

  PacMatrix mat(grid, method, cfg);
  detail::CoherenceRows rows;
  detail::parallel_for(cells.size(), jobs, [&](std::size_t i) {
    const auto [m, n] = cells[i];
    double value = 0.0;
    try {
      if (method == Method::cv) {
        detail::require_morlet_pair(m, n, x.fs());
        value = detail::cv_from_spectrum(rows.get(n, cache), m);
      } else {
        value = detail::evaluate_cell(cache, method, m, n, cfg);
      }
    } catch (const PacError& e) {
      if (!detail::zero_cell_error(e.kind())) throw;
    }
    mat.at(m, n) = value;
  });
  return mat;
}

/// Evaluates `method` on every m < n cell; with use_cache off each cell
/// filters the raw input afresh.
inline PacMatrix compute_matrix(const Signal& x, Method method, const GridSpec& grid = {},
                                const MeasureConfig& cfg = {}, const ComputeOptions& options = {}) {
  validate(cfg);
  if (options.use_cache) {
    FilterCache cache(x, cfg);
    return compute_matrix(cache, method, grid, options.jobs);
  }
  validate(grid, x.fs());
  std::vector<std::pair<int, int>> cells;
  for (int n = grid.n_min; n <= grid.n_max; ++n)
    for (int m = grid.m_min; m <= std::min(grid.m_max, n - 1); ++m) cells.emplace_back(m, n);

  PacMatrix mat(grid, method, cfg);
  const DirectFilters direct(x, cfg);
  detail::parallel_for(cells.size(), options.jobs, [&](std::size_t i) {
    const auto [m, n] = cells[i];
    double value = 0.0;
    try {
      value = detail::evaluate_cell(direct, method, m, n, cfg);
    } catch (const PacError& e) {
      if (!detail::zero_cell_error(e.kind())) throw;
    }
    mat.at(m, n) = value;
  });
  return mat;
}

/// Divides by the global maximum; an all-zero matrix is returned as is.
inline PacMatrix normalize(PacMatrix mat) {
  const double peak = mat.max_value();
  if (peak > 0.0)
    for (double& v : mat.values()) v /= peak;
  mat.set_normalized(true);
  return mat;
}

/// Largest cell; ties go to the smallest n, then the smallest m. Empty for an
/// all-zero matrix.
inline std::optional<Peak> argmax(const PacMatrix& mat) {
  const auto& g = mat.grid();
  std::optional<Peak> best;
  for (int n = g.n_min; n <= g.n_max; ++n)
    for (int m = g.m_min; m <= g.m_max; ++m) {
      const double v = mat.at(m, n);
      if (v > 0.0 && (!best || v > best->value)) best = Peak{m, n, v};
    }
  return best;
}

/// True when (m, n) is positive and no 8-neighbour inside the grid exceeds it.
inline bool is_local_max(const PacMatrix& mat, int m, int n) {
  const double v = mat.at(m, n);
  if (!(v > 0.0)) return false;
  for (int dn = -1; dn <= 1; ++dn)
    for (int dm = -1; dm <= 1; ++dm) {
      if (dm == 0 && dn == 0) continue;
      if (mat.grid().contains(m + dm, n + dn) && mat.at(m + dm, n + dn) > v) return false;
    }
  return true;
}

/// Manhattan distance in Hz between the found peak and the true pair;
/// +infinity when there is no peak.
inline double localization_error(const std::optional<Peak>& found, FrequencyPair truth) {
  if (!found) return std::numeric_limits<double>::infinity();
  return std::abs(found->m - truth.m) + std::abs(found->n - truth.n);
}

inline bool within_one_hz(const std::optional<Peak>& found, FrequencyPair truth) {
  return found && std::abs(found->m - truth.m) <= 1 && std::abs(found->n - truth.n) <= 1;
}

}  // namespace pac_lab
