// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pac_lab Authors

// Command-line front end: synth, pac, psd, compare, heatmap.
//
// Exit codes: 0 success, 2 usage, 3 I/O, 4 numeric or degenerate input.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pac_lab/pac_lab.hpp"

using namespace pac_lab;
using io::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input:
    case ErrorKind::invalid_method: return kExitUsage;
    case ErrorKind::io: return kExitIo;
    default: return kExitNumeric;
  }
}

class Timer {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// Writes `manifest` next to `primary_output`, or prints it for a dry run.
void finish(io::RunManifest manifest, const std::string& primary_output, bool dry_run, const Timer& timer) {
  if (dry_run) {
    std::cout << manifest.to_json().dump(2) << "\n";
    return;
  }
  manifest.duration_s = timer.seconds();
  io::write_json(io::manifest_path(primary_output), manifest.to_json());
}

/// "a:b" with integer a, b.
std::pair<int, int> parse_int_pair(const std::string& text, const std::string& what) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument("no colon");
    std::size_t used_a = 0, used_b = 0;
    const int a = std::stoi(text.substr(0, colon), &used_a);
    const int b = std::stoi(text.substr(colon + 1), &used_b);
    if (used_a != colon || used_b != text.size() - colon - 1) throw std::invalid_argument("trailing characters");
    return {a, b};
  } catch (const std::logic_error&) {
    fail(ErrorKind::invalid_input, what + " '" + text + "' must look like A:B with integers");
  }
}

std::vector<FrequencyPair> parse_pairs(const std::vector<std::string>& items) {
  std::vector<FrequencyPair> pairs;
  for (const auto& item : items) {
    const auto [m, n] = parse_int_pair(item, "pair");
    if (!(m >= 1 && m < n)) fail(ErrorKind::invalid_input, "pair '" + item + "' needs 1 <= m < n");
    pairs.push_back({m, n});
  }
  if (pairs.empty()) fail(ErrorKind::invalid_input, "the pair list is empty");
  return pairs;
}

std::vector<Method> parse_methods(const std::vector<std::string>& items) {
  std::vector<Method> methods;
  for (const auto& item : items) methods.push_back(parse_method(item));
  if (methods.empty()) fail(ErrorKind::invalid_input, "the method list is empty");
  return methods;
}

Taper parse_taper(const std::string& name) {
  if (name == "hann") return Taper::hann;
  if (name == "rectangular") return Taper::rectangular;
  fail(ErrorKind::invalid_input, "unknown taper '" + name + "'");
}

// ---------------------------------------------------------------------------
// Shared option groups

struct MeasureOptions {
  std::size_t kld_bins = 50;
  double mca_bw = 1.0;
  double cycles = 4.0;
  double truncation = 4.0;
  std::optional<std::size_t> edge_trim;
  std::string m_range = "1:50";
  std::string n_range = "1:50";

  void add(CLI::App& cmd) {
    cmd.add_option("--kld-bins", kld_bins, "Phase bins for kld")->capture_default_str();
    cmd.add_option("--mca-bw", mca_bw, "Gabor bandwidth in Hz for mca (and the eps envelope band)")->capture_default_str();
    cmd.add_option("--cycles", cycles, "Morlet cycles for eps, mvl, cv, kld")->capture_default_str();
    cmd.add_option("--truncation", truncation, "Kernel support in envelope standard deviations")->capture_default_str();
    cmd.add_option("--edge-trim", edge_trim, "Samples dropped from each end (default: per-method automatic)");
    cmd.add_option("--m-range", m_range, "Modulating axis A:B in Hz")->capture_default_str();
    cmd.add_option("--n-range", n_range, "Modulated axis A:B in Hz")->capture_default_str();
  }

  MeasureConfig config() const {
    MeasureConfig cfg;
    cfg.kld_bins = kld_bins;
    cfg.mca_bw = mca_bw;
    cfg.morlet_cycles = cycles;
    cfg.truncation = truncation;
    cfg.edge_trim = edge_trim;
    validate(cfg);
    return cfg;
  }

  GridSpec grid() const {
    const auto [m_min, m_max] = parse_int_pair(m_range, "--m-range");
    const auto [n_min, n_max] = parse_int_pair(n_range, "--n-range");
    return {m_min, m_max, n_min, n_max};
  }
};

unsigned checked_jobs(int jobs) {
  if (jobs < 1) fail(ErrorKind::invalid_input, "--jobs must be at least 1");
  return static_cast<unsigned>(jobs);
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  double m = 8.0, n = 45.0, ami = 0.25, dur = 10.0, fs = 1000.0, noise_power = 0.0;
  std::optional<double> clean_power;
  std::uint64_t seed = 1;
  std::optional<int> preset_pair;
  std::string output;
  bool dry_run = false;
};

SynthesisSpec synth_spec(const SynthArgs& a) {
  if (a.preset_pair) return benchmark_spec(*a.preset_pair, a.seed);
  SynthesisSpec spec;
  spec.m = a.m;
  spec.n = a.n;
  spec.ami = a.ami;
  spec.duration = a.dur;
  spec.fs = a.fs;
  spec.noise_power = a.noise_power;
  spec.seed = a.seed;
  if (a.clean_power) spec.clean_scale = clean_scale_for_power(*a.clean_power, a.ami);
  return spec;
}

json to_json(const SynthesisSpec& s) {
  return {{"m", s.m},         {"n", s.n},         {"ami", s.ami},
          {"duration_s", s.duration}, {"fs_hz", s.fs}, {"noise_power", s.noise_power},
          {"clean_scale", s.clean_scale}, {"seed", s.seed}};
}

int run_synth(const SynthArgs& a) {
  const Timer timer;
  const auto spec = synth_spec(a);
  validate(spec);
  io::RunManifest manifest;
  manifest.command = "synth";
  manifest.parameters = to_json(spec);
  if (a.preset_pair) manifest.parameters["preset_pair"] = *a.preset_pair;
  manifest.seeds = {spec.seed};
  manifest.outputs = {a.output};
  if (a.dry_run) {
    finish(manifest, a.output, true, timer);
    return 0;
  }
  const auto result = synth_pac(spec);
  io::write_signal(a.output, result.composite);
  const double clean_power = power(result.clean);
  const double noise_power = power(result.noise);
  manifest.parameters["realized"] = {{"clean_power", clean_power},
                                     {"noise_power", noise_power},
                                     {"snr", snr(result.clean, result.noise)}};
  finish(manifest, a.output, false, timer);
  std::cout << "wrote " << result.composite.size() << " samples to " << a.output << " (clean power "
            << io::format_double(clean_power) << ", noise power " << io::format_double(noise_power) << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------
// pac

struct PacArgs {
  std::string method;
  std::string input;
  std::string output;
  MeasureOptions measure;
  int jobs = 1;
  bool dry_run = false;
};

std::string metadata_path(const std::string& output) { return output + ".meta.json"; }

int run_pac(const PacArgs& a) {
  const Timer timer;
  const Method method = parse_method(a.method);
  const auto cfg = a.measure.config();
  const auto grid = a.measure.grid();
  const unsigned jobs = checked_jobs(a.jobs);
  io::RunManifest manifest;
  manifest.command = "pac";
  manifest.parameters = {{"method", std::string(to_string(method))},
                         {"grid", io::to_json(grid)},
                         {"config", io::to_json(cfg)},
                         {"jobs", jobs}};
  manifest.inputs = {a.input};
  manifest.outputs = {a.output, metadata_path(a.output)};
  if (a.dry_run) {
    validate(grid, std::numeric_limits<double>::infinity());
    finish(manifest, a.output, true, timer);
    return 0;
  }
  const auto x = io::read_signal(a.input);
  const auto mat = normalize(compute_matrix(x, method, grid, cfg, ComputeOptions{true, jobs}));
  io::write_matrix(a.output, mat);
  io::write_json(metadata_path(a.output), io::matrix_metadata(mat));
  finish(manifest, a.output, false, timer);
  if (const auto peak = argmax(mat))
    std::cout << "argmax m=" << peak->m << " n=" << peak->n << "\n";
  else
    std::cout << "argmax none (all cells zero)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// psd

struct PsdArgs {
  std::string input;
  std::string output;
  std::size_t window = 4096;
  double overlap = 0.25;
  std::string taper = "hann";
  bool dry_run = false;
};

int run_psd(const PsdArgs& a) {
  const Timer timer;
  const WelchSpec welch{a.window, a.overlap, parse_taper(a.taper)};
  validate(welch);
  io::RunManifest manifest;
  manifest.command = "psd";
  manifest.parameters = {{"welch", io::to_json(welch)}};
  manifest.inputs = {a.input};
  manifest.outputs = {a.output};
  if (a.dry_run) {
    finish(manifest, a.output, true, timer);
    return 0;
  }
  const auto x = io::read_signal(a.input);
  const auto spectrum = welch_psd(x, welch);
  if (spectrum.window_clipped(welch))
    std::cerr << "warning: window " << welch.window_len << " exceeds the signal length " << x.size() << "; using "
              << spectrum.window_len << " samples (" << spectrum.segments << " segment)\n";
  io::write_text(a.output, io::spectrum_to_csv(spectrum));
  manifest.parameters["window_used"] = spectrum.window_len;
  manifest.parameters["segments"] = spectrum.segments;
  finish(manifest, a.output, false, timer);
  return 0;
}

// ---------------------------------------------------------------------------
// compare

struct CompareArgs {
  std::vector<std::string> pairs{"8:45", "12:45", "20:45", "30:45"};
  std::size_t seeds = 10;
  std::uint64_t seed_base = 1;
  std::vector<std::string> methods{"mca", "eps", "mvl", "cv", "kld"};
  double ami = kBenchmarkAmi, dur = kBenchmarkDuration, fs = kBenchmarkFs;
  double noise_power = kBenchmarkNoisePower, clean_power = kBenchmarkCleanPower;
  MeasureOptions measure;
  std::string output;
  std::optional<std::string> matrix_dir;
  int jobs = 1;
  bool dry_run = false;
};

std::string matrix_file(const std::string& dir, const PacRun& run) {
  return (std::filesystem::path(dir) / (std::string(to_string(run.method)) + "_" + std::to_string(run.pair.m) + "_" +
                                        std::to_string(run.pair.n) + "_seed" + std::to_string(run.seed) + ".csv"))
      .string();
}

int run_compare(const CompareArgs& a) {
  const Timer timer;
  ComparisonSpec spec;
  spec.pairs = parse_pairs(a.pairs);
  spec.methods = parse_methods(a.methods);
  if (a.seeds < 1) fail(ErrorKind::invalid_input, "--seeds must be at least 1");
  spec.seeds.clear();
  for (std::size_t k = 0; k < a.seeds; ++k) spec.seeds.push_back(a.seed_base + k);
  spec.ami = a.ami;
  spec.duration = a.dur;
  spec.fs = a.fs;
  spec.noise_power = a.noise_power;
  spec.clean_power = a.clean_power;
  spec.grid = a.measure.grid();
  spec.config = a.measure.config();
  spec.keep_matrices = a.matrix_dir.has_value();
  const unsigned jobs = checked_jobs(a.jobs);
  for (const auto& pair : spec.pairs) validate(comparison_signal_spec(spec, pair, 0));
  validate(spec.grid, spec.fs);

  io::RunManifest manifest;
  manifest.command = "compare";
  manifest.parameters = io::to_json(spec);
  manifest.parameters["jobs"] = jobs;
  if (a.matrix_dir) manifest.parameters["matrix_dir"] = *a.matrix_dir;
  manifest.seeds = spec.seeds;
  manifest.outputs = {a.output};
  if (a.dry_run) {
    finish(manifest, a.output, true, timer);
    return 0;
  }

  const auto report = run_comparison(spec, jobs);
  io::write_json(a.output, io::report_to_json(report, spec));
  if (a.matrix_dir) {
    std::error_code ec;
    std::filesystem::create_directories(*a.matrix_dir, ec);
    if (ec) fail(ErrorKind::io, "cannot create '" + *a.matrix_dir + "': " + ec.message());
    for (std::size_t i = 0; i < report.runs.size(); ++i) {
      const auto path = matrix_file(*a.matrix_dir, report.runs[i]);
      io::write_matrix(path, *report.matrices[i]);
      manifest.outputs.push_back(path);
    }
  }
  finish(manifest, a.output, false, timer);

  std::printf("%-7s %-6s %6s %10s %10s %8s\n", "pair", "method", "runs", "mean_err", "median_err", "within1");
  for (const auto& s : report.summaries)
    std::printf("%-7s %-6s %6zu %10.3f %10.3f %5zu/%zu\n", io::pair_text(s.pair).c_str(),
                std::string(to_string(s.method)).c_str(), s.runs, s.mean_error, s.median_error, s.within_one_hz, s.runs);
  return 0;
}

// ---------------------------------------------------------------------------
// heatmap

struct HeatmapArgs {
  std::string input;
  std::string output;
  bool dry_run = false;
};

int run_heatmap(const HeatmapArgs& a) {
  const Timer timer;
  io::RunManifest manifest;
  manifest.command = "heatmap";
  manifest.inputs = {a.input};
  manifest.outputs = {a.output};
  if (a.dry_run) {
    finish(manifest, a.output, true, timer);
    return 0;
  }
  const auto mat = io::read_matrix(a.input);
  io::write_text(a.output, io::matrix_to_pgm(mat));
  manifest.parameters = {{"grid", io::to_json(mat.grid())}, {"normalized", mat.normalized()}};
  finish(manifest, a.output, false, timer);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-amplitude coupling toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Synthesize a coupled test signal");
  auto* s_m = s->add_option("--m", synth.m, "Modulating frequency in Hz")->capture_default_str();
  auto* s_n = s->add_option("--n", synth.n, "Modulated frequency in Hz")->capture_default_str();
  auto* s_ami = s->add_option("--ami", synth.ami, "Amplitude modulation index")->capture_default_str();
  auto* s_dur = s->add_option("--dur", synth.dur, "Duration in seconds")->capture_default_str();
  auto* s_fs = s->add_option("--fs", synth.fs, "Sampling rate in Hz")->capture_default_str();
  auto* s_np = s->add_option("--noise-power", synth.noise_power, "Pink-noise power")->capture_default_str();
  auto* s_cp = s->add_option("--clean-power", synth.clean_power, "Scale the clean part to this power");
  s->add_option("--seed", synth.seed, "Noise seed")->capture_default_str();
  s->add_option("--paper-pair", synth.preset_pair, "Benchmark preset 1..4: (8,45) (12,45) (20,45) (30,45)")
      ->check(CLI::Range(1, 4))
      ->excludes(s_m)
      ->excludes(s_n)
      ->excludes(s_ami)
      ->excludes(s_dur)
      ->excludes(s_fs)
      ->excludes(s_np)
      ->excludes(s_cp);
  s->add_option("-o,--output", synth.output, "Signal CSV to write")->required();
  s->add_flag("--dry-run", synth.dry_run, "Print the manifest without computing");

  PacArgs pac;
  auto* p = app.add_subcommand("pac", "Compute a normalized comodulogram");
  p->add_option("--method", pac.method, "mca, eps, mvl, cv or kld")->required();
  p->add_option("-i,--input", pac.input, "Signal CSV")->required();
  p->add_option("-o,--output", pac.output, "Matrix CSV to write")->required();
  pac.measure.add(*p);
  p->add_option("--jobs", pac.jobs, "Worker threads")->envname("PAC_LAB_JOBS")->capture_default_str();
  p->add_flag("--dry-run", pac.dry_run, "Print the manifest without computing");

  PsdArgs psd;
  auto* w = app.add_subcommand("psd", "Welch power spectral density");
  w->add_option("-i,--input", psd.input, "Signal CSV")->required();
  w->add_option("-o,--output", psd.output, "Spectrum CSV to write")->required();
  w->add_option("--window", psd.window, "Segment length in samples")->capture_default_str();
  w->add_option("--overlap", psd.overlap, "Fractional overlap in [0, 1)")->capture_default_str();
  w->add_option("--taper", psd.taper, "hann or rectangular")->capture_default_str();
  w->add_flag("--dry-run", psd.dry_run, "Print the manifest without computing");

  CompareArgs cmp;
  auto* c = app.add_subcommand("compare", "Localization benchmark across methods, pairs and seeds");
  c->add_option("--pairs", cmp.pairs, "Comma-separated m:n pairs")->delimiter(',')->capture_default_str();
  c->add_option("--seeds", cmp.seeds, "Number of seeds per pair")->capture_default_str();
  c->add_option("--seed-base", cmp.seed_base, "First seed")->capture_default_str();
  c->add_option("--methods", cmp.methods, "Comma-separated methods")->delimiter(',')->capture_default_str();
  c->add_option("--ami", cmp.ami, "Amplitude modulation index")->capture_default_str();
  c->add_option("--dur", cmp.dur, "Duration in seconds")->capture_default_str();
  c->add_option("--fs", cmp.fs, "Sampling rate in Hz")->capture_default_str();
  c->add_option("--noise-power", cmp.noise_power, "Pink-noise power")->capture_default_str();
  c->add_option("--clean-power", cmp.clean_power, "Clean power (0 keeps unit scale)")->capture_default_str();
  cmp.measure.add(*c);
  c->add_option("-o,--output", cmp.output, "Report JSON to write")->required();
  c->add_option("--matrix-dir", cmp.matrix_dir, "Also write every normalized matrix here");
  c->add_option("--jobs", cmp.jobs, "Worker threads")->envname("PAC_LAB_JOBS")->capture_default_str();
  c->add_flag("--dry-run", cmp.dry_run, "Print the manifest without computing");

  HeatmapArgs heat;
  auto* h = app.add_subcommand("heatmap", "Render a matrix CSV as a binary PGM image");
  h->add_option("-i,--input", heat.input, "Matrix CSV")->required();
  h->add_option("-o,--output", heat.output, "PGM to write")->required();
  h->add_flag("--dry-run", heat.dry_run, "Print the manifest without computing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (s->parsed()) return run_synth(synth);
    if (p->parsed()) return run_pac(pac);
    if (w->parsed()) return run_psd(psd);
    if (c->parsed()) return run_compare(cmp);
    if (h->parsed()) return run_heatmap(heat);
  } catch (const PacError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
