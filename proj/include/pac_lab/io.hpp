// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pac_lab Authors

#pragma once

// File formats used by the command-line tool.
//
// Signal CSV    optional "# fs_hz: <rate>" line, header "time_s,value", one
//               row per sample, 17 significant digits (round-trips exactly).
// Matrix CSV    "#"-prefixed metadata lines (method, normalized, grid,
//               argmax) then one row per n ascending, one column per m.
// Heatmap PGM   binary P5, one pixel per cell, top row = largest n.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "pac_lab/comodulogram.hpp"
#include "pac_lab/compare.hpp"
#include "pac_lab/error.hpp"
#include "pac_lab/signal.hpp"
#include "pac_lab/spectral.hpp"
#include "pac_lab/version.hpp"

namespace pac_lab::io {

using json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open '" + path + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_text(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot open '" + path + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(ErrorKind::io, "write to '" + path + "' failed");
}

namespace detail {

inline std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view s, const std::string& where) {
  s = strip(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
    fail(ErrorKind::io, where + ": cannot parse number '" + std::string(s) + "'");
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::vector<std::string_view> lines(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto line : split(text, '\n')) {
    line = strip(line);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

/// Value following "key:" in a metadata comment, if the line carries that key.
inline std::optional<std::string_view> meta_value(std::string_view line, std::string_view key) {
  line = strip(line.substr(1));
  if (line.substr(0, key.size()) != key || line.size() <= key.size() || line[key.size()] != ':') return std::nullopt;
  return strip(line.substr(key.size() + 1));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Signals

inline std::string signal_to_csv(const Signal& x) {
  std::string out;
  out.reserve(x.size() * 48);
  out += "# fs_hz: " + format_double(x.fs()) + "\n";
  out += "time_s,value\n";
  for (std::size_t k = 0; k < x.size(); ++k) {
    out += format_double(x.time(k));
    out += ',';
    out += format_double(x[k]);
    out += '\n';
  }
  return out;
}

inline Signal signal_from_csv(std::string_view text, const std::string& where = "signal") {
  std::optional<double> declared_fs;
  bool header_seen = false;
  std::vector<double> times, values;
  for (auto line : detail::lines(text)) {
    if (line.front() == '#') {
      if (auto v = detail::meta_value(line, "fs_hz")) declared_fs = detail::parse_double(*v, where);
      continue;
    }
    if (!header_seen) {
      if (line != "time_s,value") fail(ErrorKind::io, where + ": expected header 'time_s,value'");
      header_seen = true;
      continue;
    }
    const auto cols = detail::split(line, ',');
    if (cols.size() != 2) fail(ErrorKind::io, where + ": expected 2 columns per row");
    times.push_back(detail::parse_double(cols[0], where));
    values.push_back(detail::parse_double(cols[1], where));
  }
  if (!header_seen) fail(ErrorKind::io, where + ": missing header");
  if (values.empty()) fail(ErrorKind::io, where + ": no samples");
  if (values.size() < 2 && !declared_fs) fail(ErrorKind::io, where + ": cannot infer sampling rate from one sample");

  double fs = declared_fs.value_or(0.0);
  if (values.size() >= 2) {
    const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    if (!(dt > 0.0)) fail(ErrorKind::io, where + ": time stamps must increase");
    for (std::size_t k = 1; k < times.size(); ++k)
      if (std::abs((times[k] - times[k - 1]) - dt) > 1e-9 * dt * std::max(1.0, times[k] / dt * 1e-6))
        fail(ErrorKind::io, where + ": non-uniform sample spacing at row " + std::to_string(k + 1));
    if (!declared_fs) fs = 1.0 / dt;
    else if (std::abs(*declared_fs * dt - 1.0) > 1e-9)
      fail(ErrorKind::io, where + ": declared fs_hz disagrees with the time stamps");
  }
  try {
    return Signal(std::move(values), fs);
  } catch (const PacError& e) {
    fail(ErrorKind::io, where + ": " + e.what());
  }
}

inline void write_signal(const std::string& path, const Signal& x) { write_text(path, signal_to_csv(x)); }

inline Signal read_signal(const std::string& path) { return signal_from_csv(read_text(path), path); }

// ---------------------------------------------------------------------------
// Spectra

inline std::string spectrum_to_csv(const Spectrum& s) {
  std::string out = s.kind == SpectrumKind::psd ? "freq_hz,psd\n" : "freq_hz,coherence\n";
  for (std::size_t k = 0; k < s.freqs.size(); ++k) out += format_double(s.freqs[k]) + "," + format_double(s.values[k]) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Matrices

inline std::string grid_text(const GridSpec& g) {
  return "m=" + std::to_string(g.m_min) + ".." + std::to_string(g.m_max) + " n=" + std::to_string(g.n_min) + ".." +
         std::to_string(g.n_max);
}

inline std::string matrix_to_csv(const PacMatrix& mat) {
  const auto& g = mat.grid();
  std::string out;
  out += "# method: " + std::string(to_string(mat.method())) + "\n";
  out += std::string("# normalized: ") + (mat.normalized() ? "true" : "false") + "\n";
  out += "# grid: " + grid_text(g) + "\n";
  if (const auto peak = argmax(mat))
    out += "# argmax: m=" + std::to_string(peak->m) + " n=" + std::to_string(peak->n) + " value=" +
           format_double(peak->value) + "\n";
  else
    out += "# argmax: none\n";
  for (int n = g.n_min; n <= g.n_max; ++n) {
    for (int m = g.m_min; m <= g.m_max; ++m) {
      if (m > g.m_min) out += ',';
      out += format_double(mat.at(m, n));
    }
    out += '\n';
  }
  return out;
}

namespace detail {

inline GridSpec parse_grid(std::string_view text, const std::string& where) {
  // "m=A..B n=C..D"
  GridSpec g;
  int* targets[] = {&g.m_min, &g.m_max, &g.n_min, &g.n_max};
  std::size_t idx = 0;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  while (p < end && idx < 4) {
    if (*p >= '0' && *p <= '9') {
      const auto [next, ec] = std::from_chars(p, end, *targets[idx]);
      if (ec != std::errc{}) break;
      ++idx;
      p = next;
    } else {
      ++p;
    }
  }
  if (idx != 4) fail(ErrorKind::io, where + ": malformed grid line");
  return g;
}

}  // namespace detail

inline PacMatrix matrix_from_csv(std::string_view text, const std::string& where = "matrix") {
  std::optional<GridSpec> grid;
  Method method = Method::mca;
  bool normalized = false;
  std::vector<std::vector<double>> rows;
  for (auto line : detail::lines(text)) {
    if (line.front() == '#') {
      if (auto v = detail::meta_value(line, "grid")) grid = detail::parse_grid(*v, where);
      else if (auto v2 = detail::meta_value(line, "method")) {
        try {
          method = parse_method(*v2);
        } catch (const PacError&) {
          fail(ErrorKind::io, where + ": unknown method in metadata");
        }
      } else if (auto v3 = detail::meta_value(line, "normalized")) normalized = *v3 == "true";
      continue;
    }
    std::vector<double> row;
    for (auto cell : detail::split(line, ',')) row.push_back(detail::parse_double(cell, where));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorKind::io, where + ": no matrix rows");
  const std::size_t cols = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != cols) fail(ErrorKind::io, where + ": ragged matrix rows");
  if (!grid) grid = GridSpec{1, static_cast<int>(cols), 1, static_cast<int>(rows.size())};
  if (grid->m_count() != cols || grid->n_count() != rows.size())
    fail(ErrorKind::io, where + ": matrix shape disagrees with its grid line");

  PacMatrix mat(*grid, method);
  mat.set_normalized(normalized);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      if (rows[r][c] < 0.0) fail(ErrorKind::io, where + ": negative matrix value");
      mat.at(grid->m_min + static_cast<int>(c), grid->n_min + static_cast<int>(r)) = rows[r][c];
    }
  return mat;
}

inline void write_matrix(const std::string& path, const PacMatrix& mat) { write_text(path, matrix_to_csv(mat)); }

inline PacMatrix read_matrix(const std::string& path) { return matrix_from_csv(read_text(path), path); }

/// Binary greyscale image, pixel = round(255 * clamp(cell, 0, 1)).
inline std::string matrix_to_pgm(const PacMatrix& mat) {
  const auto& g = mat.grid();
  std::string out = "P5\n# rows: n increases upward (top row n=" + std::to_string(g.n_max) + "), columns: m increases to the right\n";
  out += std::to_string(g.m_count()) + " " + std::to_string(g.n_count()) + " 255\n";
  for (int n = g.n_max; n >= g.n_min; --n)
    for (int m = g.m_min; m <= g.m_max; ++m) {
      const double v = std::clamp(mat.at(m, n), 0.0, 1.0);
      out += static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * v)));
    }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

inline json to_json(const GridSpec& g) {
  return {{"m_min", g.m_min}, {"m_max", g.m_max}, {"n_min", g.n_min}, {"n_max", g.n_max}};
}

inline json to_json(const WelchSpec& w) {
  return {{"window_len", w.window_len}, {"overlap", w.overlap}, {"taper", w.taper == Taper::hann ? "hann" : "rectangular"}};
}

inline json to_json(const MeasureConfig& c) {
  json j = {{"mca_bw", c.mca_bw},
            {"morlet_cycles", c.morlet_cycles},
            {"kld_bins", c.kld_bins},
            {"edge_trim", c.edge_trim ? json(*c.edge_trim) : json("auto")},
            {"truncation", c.truncation},
            {"welch", to_json(c.welch)}};
  return j;
}

inline json to_json(const std::optional<Peak>& p) {
  if (!p) return nullptr;
  return {{"m", p->m}, {"n", p->n}, {"value", p->value}};
}

inline json matrix_metadata(const PacMatrix& mat) {
  return {{"schema", 1},
          {"method", std::string(to_string(mat.method()))},
          {"normalized", mat.normalized()},
          {"grid", to_json(mat.grid())},
          {"argmax", to_json(argmax(mat))},
          {"config", to_json(mat.config())}};
}

inline std::string pair_text(FrequencyPair p) { return std::to_string(p.m) + ":" + std::to_string(p.n); }

inline json to_json(const ComparisonSpec& spec) {
  json pairs = json::array(), methods = json::array();
  for (const auto& p : spec.pairs) pairs.push_back(pair_text(p));
  for (Method m : spec.methods) methods.push_back(std::string(to_string(m)));
  return {{"pairs", pairs},         {"seeds", spec.seeds},     {"methods", methods},
          {"ami", spec.ami},        {"duration_s", spec.duration}, {"fs_hz", spec.fs},
          {"noise_power", spec.noise_power}, {"clean_power", spec.clean_power},
          {"grid", to_json(spec.grid)}, {"config", to_json(spec.config)}};
}

inline json report_to_json(const PacReport& report, const ComparisonSpec& spec) {
  json runs = json::array(), summaries = json::array();
  for (const auto& r : report.runs)
    runs.push_back({{"pair", pair_text(r.pair)},
                    {"method", std::string(to_string(r.method))},
                    {"seed", r.seed},
                    {"argmax", to_json(r.peak)},
                    {"error_hz", r.error}});
  for (const auto& s : report.summaries)
    summaries.push_back({{"pair", pair_text(s.pair)},
                         {"method", std::string(to_string(s.method))},
                         {"runs", s.runs},
                         {"mean_error_hz", s.mean_error},
                         {"median_error_hz", s.median_error},
                         {"max_error_hz", s.max_error},
                         {"within_one_hz", s.within_one_hz}});
  return {{"schema", 1}, {"spec", to_json(spec)}, {"runs", runs}, {"summaries", summaries}};
}

/// Describes one invocation. Written next to every output; the outputs
/// themselves never carry timing so reruns compare equal byte for byte.
struct RunManifest {
  std::string command;
  json parameters = json::object();
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  double duration_s = 0.0;

  json to_json() const {
    return {{"schema", 1},
            {"command", command},
            {"version", kVersion},
            {"parameters", parameters},
            {"seeds", seeds},
            {"inputs", inputs},
            {"outputs", outputs},
            {"duration_s", duration_s}};
  }
};

inline std::string manifest_path(const std::string& output) { return output + ".manifest.json"; }

inline void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace pac_lab::io
