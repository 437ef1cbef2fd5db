// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pac_lab Authors

#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "pac_lab/io.hpp"

using namespace pac_lab;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

const fs::path& workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "pac_lab_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string at(const std::string& name) { return (workdir() / name).string(); }

Result run(const std::string& args, const std::string& env = "") {
  const auto out = at("stdout.txt"), err = at("stderr.txt");
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" PAC_LAB_CLI "\" " + args + " >\"" + out + "\" 2>\"" + err + "\"";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = io::read_text(out);
  r.err = io::read_text(err);
  return r;
}

io::json read_json(const std::string& path) { return io::json::parse(io::read_text(path)); }

const std::string& noise_free_signal() {
  static const std::string path = [] {
    const auto p = at("nf_8_45.csv");
    REQUIRE(run("synth --m 8 --n 45 --ami 0.25 --noise-power 0 -o " + p).code == 0);
    return p;
  }();
  return path;
}

}  // namespace

TEST_CASE("synth writes the benchmark signal and a manifest") {
  const auto path = at("s.csv");
  const auto r = run("synth --m 8 --n 45 --ami 0.25 --dur 10 --fs 1000 --noise-power 6250 --clean-power 630 --seed 1 -o " + path);
  REQUIRE(r.code == 0);
  const auto x = io::read_signal(path);
  CHECK(x.size() == 10000);
  CHECK(x.fs() == Catch::Approx(1000.0).epsilon(1e-12));
  const auto manifest = read_json(io::manifest_path(path));
  CHECK(manifest["schema"] == 1);
  CHECK(manifest["command"] == "synth");
  CHECK(manifest["seeds"][0] == 1);
  CHECK(manifest["parameters"]["realized"]["snr"].get<double>() == Catch::Approx(0.1008).margin(0.005));
}

TEST_CASE("synth benchmark preset") {
  const auto path = at("p4.csv");
  REQUIRE(run("synth --paper-pair 4 --seed 2 -o " + path).code == 0);
  const auto p = read_json(io::manifest_path(path))["parameters"];
  CHECK(p["m"] == 30.0);
  CHECK(p["n"] == 45.0);
  CHECK(p["noise_power"] == 6250.0);
  CHECK(p["realized"]["clean_power"].get<double>() == Catch::Approx(630.0).margin(10.0));
  CHECK(run("synth --paper-pair 5 -o " + path).code == 2);
  CHECK(run("synth --paper-pair 1 --m 3 -o " + path).code == 2);
}

TEST_CASE("synth usage errors") {
  CHECK(run("synth --m 50 --n 45 -o " + at("bad.csv")).code == 2);
  CHECK(run("synth --m 8 --n 45").code == 2);
  CHECK(run("synth --m eight -o " + at("bad.csv")).code == 2);
  CHECK(run("").code == 2);
  CHECK(run("nonsense").code == 2);
}

TEST_CASE("pac on the noise-free signal finds the true pair") {
  const auto out = at("m.csv");
  const auto r = run("pac --method mca -i " + noise_free_signal() + " -o " + out);
  REQUIRE(r.code == 0);
  const auto meta = read_json(out + ".meta.json");
  CHECK(meta["schema"] == 1);
  CHECK(meta["method"] == "mca");
  CHECK(meta["normalized"] == true);
  CHECK(meta["argmax"]["m"] == 8);
  CHECK(meta["argmax"]["n"] == 45);
  const auto mat = io::read_matrix(out);
  CHECK(mat.max_value() == 1.0);
  CHECK(read_json(io::manifest_path(out))["inputs"][0] == noise_free_signal());
}

TEST_CASE("pac kld honours the bin count") {
  const auto out = at("kld.csv");
  REQUIRE(run("pac --method kld --kld-bins 50 --m-range 6:10 --n-range 40:50 -i " + noise_free_signal() + " -o " + out).code == 0);
  const auto meta = read_json(out + ".meta.json");
  CHECK(meta["config"]["kld_bins"] == 50);
  CHECK(meta["grid"]["m_min"] == 6);
  CHECK(meta["grid"]["n_max"] == 50);
}

TEST_CASE("pac errors map to exit codes") {
  CHECK(run("pac --method xyz -i " + noise_free_signal() + " -o " + at("q.csv")).code == 2);
  CHECK(run("pac --method mca -i " + at("missing.csv") + " -o " + at("q.csv")).code == 3);
  io::write_text(at("garbage.csv"), "time_s,value\n0,1\n0.001,oops\n");
  CHECK(run("pac --method mca -i " + at("garbage.csv") + " -o " + at("q.csv")).code == 3);
  io::write_text(at("short.csv"), "time_s,value\n0,1\n0.001,2\n0.002,3\n0.003,4\n");
  const auto r = run("pac --method mca -i " + at("short.csv") + " -o " + at("q.csv"));
  CHECK(r.code == 4);
  CHECK(r.err.find("empty-result") != std::string::npos);
  CHECK(run("pac --method mca --jobs 0 -i " + noise_free_signal() + " -o " + at("q.csv")).code == 2);
  CHECK(run("pac --method mca --m-range 5 -i " + noise_free_signal() + " -o " + at("q.csv")).code == 2);
}

TEST_CASE("psd shows the benchmark peaks") {
  const auto sig = at("b12.csv");
  REQUIRE(run("synth --paper-pair 2 --seed 3 -o " + sig).code == 0);
  const auto out = at("psd.csv");
  const auto r = run("psd -i " + sig + " -o " + out);
  REQUIRE(r.code == 0);
  CHECK(r.err.empty());
  const auto lines = io::detail::lines(io::read_text(out));
  REQUIRE(lines.front() == "freq_hz,psd");
  std::vector<double> f, p;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto cols = io::detail::split(lines[k], ',');
    f.push_back(io::detail::parse_double(cols[0], "psd"));
    p.push_back(io::detail::parse_double(cols[1], "psd"));
  }
  const auto peak_in = [&](double lo, double hi) {
    double best_f = 0.0, best = -1.0;
    for (std::size_t k = 0; k < f.size(); ++k)
      if (f[k] >= lo && f[k] <= hi && p[k] > best) best = p[k], best_f = f[k];
    return best_f;
  };
  CHECK(peak_in(9.0, 15.0) == Catch::Approx(12.0).margin(0.3));
  CHECK(peak_in(40.0, 50.0) == Catch::Approx(45.0).margin(0.3));
  const auto manifest = read_json(io::manifest_path(out));
  CHECK(manifest["parameters"]["welch"]["window_len"] == 4096);
  CHECK(manifest["parameters"]["welch"]["overlap"] == 0.25);
}

TEST_CASE("psd of a pure tone has one dominant peak") {
  const auto sig = at("tone.csv");
  REQUIRE(run("synth --m 20 --n 45 --ami 0 --noise-power 0 -o " + sig).code == 0);
  // The synthetic signal always carries the 0.5 carrier; compare the two lines.
  const auto out = at("tone_psd.csv");
  REQUIRE(run("psd -i " + sig + " -o " + out).code == 0);
  const auto lines = io::detail::lines(io::read_text(out));
  double best = 0.0, best_f = 0.0, total = 0.0;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto cols = io::detail::split(lines[k], ',');
    const double fk = io::detail::parse_double(cols[0], "psd"), pk = io::detail::parse_double(cols[1], "psd");
    total += pk;
    if (pk > best) best = pk, best_f = fk;
  }
  CHECK(best_f == Catch::Approx(20.0).margin(0.3));
  CHECK(best > 0.2 * total);
}

TEST_CASE("psd clips an oversized window with a warning") {
  const auto sig = at("b12.csv");
  REQUIRE(run("synth --paper-pair 2 --seed 3 -o " + sig).code == 0);
  const auto r = run("psd --window 16384 -i " + sig + " -o " + at("clip.csv"));
  CHECK(r.code == 0);
  CHECK(r.err.find("warning") != std::string::npos);
  CHECK(read_json(io::manifest_path(at("clip.csv")))["parameters"]["window_used"] == 10000);
  CHECK(run("psd --taper triangle -i " + sig + " -o " + at("clip.csv")).code == 2);
}

TEST_CASE("compare without noise localizes mca exactly") {
  const auto out = at("report.json");
  const auto r = run("compare --pairs 8:45,12:45,20:45,30:45 --seeds 1 --noise-power 0 --methods mca -o " + out +
                     " --matrix-dir " + at("mats"));
  REQUIRE(r.code == 0);
  const auto report = read_json(out);
  CHECK(report["schema"] == 1);
  REQUIRE(report["runs"].size() == 4);
  for (const auto& run_entry : report["runs"]) CHECK(run_entry["error_hz"] == 0.0);
  CHECK(report["summaries"].size() == 4);
  CHECK(fs::exists(at("mats/mca_30_45_seed1.csv")));
  const auto manifest = read_json(io::manifest_path(out));
  CHECK(manifest["outputs"].size() == 5);
}

TEST_CASE("compare usage errors") {
  CHECK(run("compare --pairs \"\" -o " + at("r.json")).code == 2);
  CHECK(run("compare --pairs 45:8 -o " + at("r.json")).code == 2);
  CHECK(run("compare --methods mca,xyz -o " + at("r.json")).code == 2);
  CHECK(run("compare --seeds 0 -o " + at("r.json")).code == 2);
}

TEST_CASE("heatmap renders the matrix") {
  const auto mat_path = at("m.csv");
  REQUIRE(run("pac --method mca -i " + noise_free_signal() + " -o " + mat_path).code == 0);
  const auto pgm_path = at("m.pgm");
  REQUIRE(run("heatmap -i " + mat_path + " -o " + pgm_path).code == 0);
  const auto pgm = io::read_text(pgm_path);
  const std::string header = "P5\n# rows: n increases upward (top row n=50), columns: m increases to the right\n50 50 255\n";
  REQUIRE(pgm.starts_with(header));
  REQUIRE(pgm.size() == header.size() + 2500);
  CHECK(static_cast<unsigned char>(pgm[header.size() + (50 - 45) * 50 + (8 - 1)]) == 255);

  io::write_matrix(at("zero.csv"), PacMatrix(GridSpec{}, Method::mca));
  REQUIRE(run("heatmap -i " + at("zero.csv") + " -o " + at("zero.pgm")).code == 0);
  const auto zero = io::read_text(at("zero.pgm"));
  CHECK(zero.substr(zero.size() - 2500) == std::string(2500, '\0'));

  io::write_text(at("ragged.csv"), "1,2\n3\n");
  CHECK(run("heatmap -i " + at("ragged.csv") + " -o " + at("bad.pgm")).code == 3);
}

TEST_CASE("dry run prints the manifest and writes nothing") {
  for (const std::string& cmd :
       {std::string("synth --paper-pair 1 -o "), "pac --method mca -i " + noise_free_signal() + " -o ",
        "psd -i " + noise_free_signal() + " -o ", std::string("compare --seeds 2 -o "),
        "heatmap -i " + at("m.csv") + " -o "}) {
    const auto target = at("dry_output");
    const auto r = run(cmd + target + " --dry-run");
    REQUIRE(r.code == 0);
    const auto manifest = io::json::parse(r.out);
    CHECK(manifest["schema"] == 1);
    CHECK(manifest["outputs"][0] == target);
    CHECK_FALSE(fs::exists(target));
    CHECK_FALSE(fs::exists(io::manifest_path(target)));
  }
}

TEST_CASE("identical commands give bitwise identical outputs") {
  REQUIRE(run("synth --paper-pair 3 --seed 9 -o " + at("r1.csv")).code == 0);
  REQUIRE(run("synth --paper-pair 3 --seed 9 -o " + at("r2.csv")).code == 0);
  CHECK(io::read_text(at("r1.csv")) == io::read_text(at("r2.csv")));
  REQUIRE(run("pac --method eps -i " + at("r1.csv") + " -o " + at("e1.csv")).code == 0);
  REQUIRE(run("pac --method eps -i " + at("r2.csv") + " -o " + at("e2.csv"), "PAC_LAB_JOBS=3").code == 0);
  CHECK(io::read_text(at("e1.csv")) == io::read_text(at("e2.csv")));
  CHECK(io::read_text(at("e1.csv.meta.json")) == io::read_text(at("e2.csv.meta.json")));
  CHECK(read_json(io::manifest_path(at("e2.csv")))["parameters"]["jobs"] == 3);
}
