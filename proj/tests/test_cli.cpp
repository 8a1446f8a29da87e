#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "doctest.h"

#include "cmrwave/error.hpp"
#include "cmrwave/pipeline.hpp"
#include "support/oracles.hpp"

using namespace cmrwave;
using namespace cmrwave::testing;
namespace fs = std::filesystem;

namespace {

class Scratch {
 public:
  Scratch() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / fmt::format("cmrwave-test-{:x}", rd());
    fs::create_directories(path_);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }
  fs::path write(const std::string& name, const std::string& content) const {
    const fs::path p = path_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Outcome {
  int exit_code;
  std::string err;
  std::string out;
};

Outcome run(const Scratch& s, const std::string& args, const std::string& env = "") {
  const fs::path err = s.path() / "stderr.txt";
  const fs::path out = s.path() / "stdout.txt";
  const std::string cmd = fmt::format("{} '{}' {} >'{}' 2>'{}'", env, CMRWAVE_BIN, args,
                                      out.string(), err.string());
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err), slurp(out)};
}

std::size_t count_files(const fs::path& dir, const std::string& suffix) {
  std::size_t n = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().filename().string().ends_with(suffix)) ++n;
  }
  return n;
}

struct Inputs {
  fs::path cmr;
  fs::path config;
};

Inputs synthetic_inputs(const Scratch& s) {
  return {s.write("cmr.csv", synthetic_cmr_csv()), s.write("study.ini", five_locality_config())};
}

std::string csv_column(const std::string& csv, const std::string& column, std::size_t row) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::size_t index = 0;
  {
    std::istringstream h(line);
    std::string cell;
    for (std::size_t i = 0; std::getline(h, cell, ','); ++i) {
      if (cell == column) index = i;
    }
  }
  for (std::size_t r = 0; r <= row; ++r) std::getline(in, line);
  std::istringstream cells(line);
  std::string cell;
  for (std::size_t i = 0; i <= index; ++i) std::getline(cells, cell, ',');
  return cell;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("analyze writes the full artifact set") {
  Scratch s;
  const Inputs in = synthetic_inputs(s);
  const fs::path out = s.path() / "out";
  const Outcome r = run(s, fmt::format("analyze --cmr '{}' --config '{}' --out '{}' --diagnostics",
                                       in.cmr.string(), in.config.string(), out.string()));
  INFO(r.err);
  REQUIRE(r.exit_code == 0);
  CHECK(count_files(out, "report.txt") == 5);
  CHECK(count_files(out, ".svg") == 30);
  CHECK(count_files(out, "series.svg") == 5);
  CHECK(count_files(out, "diagnostics.csv") == 5);
  for (const char* id : {"lombardia", "ile_de_france", "birmingham", "berlin", "toronto"}) {
    CHECK(fs::exists(out / id / "radar_whole.svg"));
    for (int k = 1; k <= 4; ++k) CHECK(fs::exists(out / id / fmt::format("radar_window_{}.svg", k)));
    std::ifstream report(out / id / "report.txt");
    const auto reports = read_report(report);
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].records.size() == 5);
  }
  const RunManifest m = manifest_from_json(slurp(out / "manifest.json"));
  CHECK(m.tool_version == kToolVersion);
  CHECK(m.cmr_sha256 == sha256_file(in.cmr));
  CHECK(m.config.localities.size() == 5);
  CHECK(m.config.stl == default_stl_params());
  for (const ArtifactDigest& d : m.outputs) CHECK(sha256_file(out / d.path) == d.sha256);
}

TEST_CASE("analyze honours overrides and the output directory variable") {
  Scratch s;
  const Inputs in = synthetic_inputs(s);
  const fs::path out = s.path() / "env-out";
  const Outcome r = run(s,
                        fmt::format("analyze --cmr '{}' --config '{}' --epsilon 0.5 "
                                    "--stl-seasonal-span 15 --stl-outer 0 --jobs 2",
                                    in.cmr.string(), in.config.string()),
                        fmt::format("{}='{}'", kOutDirEnv, out.string()));
  INFO(r.err);
  REQUIRE(r.exit_code == 0);
  const RunManifest m = manifest_from_json(slurp(out / "manifest.json"));
  CHECK(m.config.epsilon == 0.5);
  CHECK(m.config.stl.seasonal_span == 15);
  CHECK(m.config.stl.trend_span == default_trend_span(7, 15));
  CHECK(m.config.stl.outer_iterations == 0);
}

TEST_CASE("usage errors exit 2") {
  Scratch s;
  const Inputs in = synthetic_inputs(s);
  CHECK(run(s, fmt::format("analyze --cmr '{}' --out '{}'", in.cmr.string(),
                           (s.path() / "o").string()))
            .exit_code == 2);
  CHECK(run(s, fmt::format("analyze --cmr '{}' --config '{}'", in.cmr.string(),
                           in.config.string()),
            fmt::format("env -u {}", kOutDirEnv))
            .exit_code == 2);
  CHECK(run(s, "").exit_code == 2);
  CHECK(run(s, "frobnicate").exit_code == 2);
  CHECK(run(s, "decompose --input x.csv").exit_code == 2);
  CHECK(!fs::exists(s.path() / "o"));
}

TEST_CASE("a locality missing from the data exits 1 and leaves nothing behind") {
  Scratch s;
  const Inputs in = synthetic_inputs(s);
  const fs::path config = s.write("bad.ini", five_locality_config() +
                                                 "\n[locality atlantis]\ncountry_region_code = XX\n"
                                                 "sub_region_1 = Atlantis\nwave1 = 2020-03-01\n"
                                                 "wave2 = 2020-11-01\n");
  const fs::path out = s.path() / "out";
  const Outcome r = run(s, fmt::format("analyze --cmr '{}' --config '{}' --out '{}'",
                                       in.cmr.string(), config.string(), out.string()));
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("atlantis") != std::string::npos);
  CHECK((!fs::exists(out) || fs::is_empty(out)));
}

TEST_CASE("a failing locality aborts the run unless asked to keep going") {
  Scratch s;
  const Inputs in = synthetic_inputs(s);
  // a second wave that runs past the end of the data
  std::string cfg = five_locality_config();
  cfg.replace(cfg.find("wave2 = 2020-11-02"), 18, "wave2 = 2021-01-30");
  const fs::path config = s.write("late.ini", cfg);
  const fs::path out = s.path() / "out";
  const std::string args = fmt::format("analyze --cmr '{}' --config '{}' --out '{}'",
                                       in.cmr.string(), config.string(), out.string());
  Outcome r = run(s, args);
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("berlin") != std::string::npos);
  CHECK((!fs::exists(out) || fs::is_empty(out)));

  r = run(s, args + " --keep-going");
  CHECK(r.exit_code == 1);
  CHECK(count_files(out, "report.txt") == 4);
  CHECK(!fs::exists(out / "berlin"));
  const RunManifest m = manifest_from_json(slurp(out / "manifest.json"));
  CHECK(m.failures.contains("berlin"));
}

TEST_CASE("reproduce verifies a recorded run") {
  Scratch s;
  const Inputs in = synthetic_inputs(s);
  const fs::path out = s.path() / "a";
  REQUIRE(run(s, fmt::format("analyze --cmr '{}' --config '{}' --out '{}'", in.cmr.string(),
                             in.config.string(), out.string()))
              .exit_code == 0);
  const Outcome ok = run(s, fmt::format("reproduce --manifest '{}' --out '{}'",
                                        (out / "manifest.json").string(),
                                        (s.path() / "b").string()));
  INFO(ok.err);
  CHECK(ok.exit_code == 0);
  CHECK(slurp(out / "manifest.json") == slurp(s.path() / "b" / "manifest.json"));

  std::ofstream(in.cmr, std::ios::app) << "\n";
  const Outcome changed = run(s, fmt::format("reproduce --manifest '{}' --out '{}'",
                                             (out / "manifest.json").string(),
                                             (s.path() / "c").string()));
  CHECK(changed.exit_code == 1);
  CHECK(changed.err.find("does not match the manifest digest") != std::string::npos);
}

TEST_CASE("decompose a constant series") {
  Scratch s;
  std::string csv = "date,value\n";
  Date d = parse_date("2020-03-01");
  for (int i = 0; i < 42; ++i, d = add_days(d, 1)) csv += format_date(d) + ",-7.5\n";
  const fs::path input = s.write("const.csv", csv);
  const Outcome r = run(s, fmt::format("decompose --input '{}' --period 7", input.string()));
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.rfind("date,value,trend,seasonal,remainder,weight\n", 0) == 0);
  for (std::size_t row = 0; row < 42; ++row) {
    CHECK(std::abs(std::stod(csv_column(r.out, "trend", row)) + 7.5) < 1e-6);
  }
  CHECK(csv_column(r.out, "date", 41) == "2020-04-11");
}

TEST_CASE("decompose recovers a weekly pattern") {
  Scratch s;
  const std::vector<double> pattern = weekly_pattern();
  std::string csv = "value\n";
  for (int i = 0; i < 70; ++i) csv += fmt::format("{}\n", pattern[static_cast<std::size_t>(i % 7)]);
  const fs::path input = s.write("weekly.csv", csv);
  const fs::path output = s.path() / "dec.csv";
  const Outcome r = run(s, fmt::format("decompose --input '{}' --period 7 --output '{}'",
                                       input.string(), output.string()));
  REQUIRE(r.exit_code == 0);
  const std::string text = slurp(output);
  for (std::size_t row = 14; row < 56; ++row) {
    CHECK(std::abs(std::stod(csv_column(text, "seasonal", row)) - pattern[row % 7]) < 1e-2);
  }
}

TEST_CASE("decompose rejects short series") {
  Scratch s;
  const fs::path input = s.write("short.csv", "value\n1\n2\n3\n4\n5\n6\n7\n8\n9\n10\n");
  const Outcome r = run(s, fmt::format("decompose --input '{}' --period 7", input.string()));
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("14") != std::string::npos);
}

TEST_CASE("single-series reader") {
  std::istringstream in("date,value\n2020-03-01,1.5\n2020-03-02,-2\n");
  const SingleSeries s = read_single_series(in);
  CHECK(s.values == std::vector<double>{1.5, -2.0});
  CHECK(s.dates == std::vector<std::string>{"2020-03-01", "2020-03-02"});
  std::istringstream no_value("date,x\n2020-03-01,1\n");
  CHECK_THROWS_AS(read_single_series(no_value), SchemaError);
  std::istringstream blank("value\n1\n\n3\n");
  CHECK(read_single_series(blank).values == std::vector<double>{1.0, 3.0});
  std::istringstream junk("value\n1\nabc\n");
  CHECK_THROWS_AS(read_single_series(junk), RowError);
}

TEST_CASE("sha256 of known strings") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("manifest json round-trips") {
  std::istringstream cfg(five_locality_config());
  RunManifest m;
  m.tool_version = std::string(kToolVersion);
  m.cmr_path = "cmr.csv";
  m.cmr_sha256 = sha256_hex("x");
  m.config_path = "study.ini";
  m.config_sha256 = sha256_hex("y");
  m.config = load_study_config(cfg);
  m.diagnostics = true;
  m.outputs = {{"a/report.txt", sha256_hex("r")}};
  m.failures = {{"berlin", "too short"}};
  const RunManifest back = manifest_from_json(to_json(m));
  CHECK(to_json(back) == to_json(m));
  CHECK(back.config.localities[2].selector.sub_region_2 == "Birmingham District");
  CHECK_THROWS_AS(manifest_from_json("{"), SchemaError);
}

}
