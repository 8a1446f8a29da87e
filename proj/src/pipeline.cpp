#include "cmrwave/pipeline.hpp"

#include <atomic>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "json.hpp"

#include "cmrwave/aggregate.hpp"
#include "cmrwave/error.hpp"
#include "cmrwave/prepare.hpp"
#include "cmrwave/render.hpp"

namespace cmrwave {

namespace fs = std::filesystem;
using nlohmann::json;

StlParams StlOverrides::apply(StlParams p) const {
  const bool base_changed = period.has_value() || seasonal_span.has_value();
  if (period) p.period = *period;
  if (seasonal_span) p.seasonal_span = *seasonal_span;
  if (trend_span) p.trend_span = *trend_span;
  else if (base_changed) p.trend_span = default_trend_span(p.period, p.seasonal_span);
  if (lowpass_span) p.lowpass_span = *lowpass_span;
  else if (period) p.lowpass_span = default_lowpass_span(p.period);
  if (seasonal_degree) p.seasonal_degree = *seasonal_degree;
  if (trend_degree) p.trend_degree = *trend_degree;
  if (lowpass_degree) p.lowpass_degree = *lowpass_degree;
  if (inner_iterations) p.inner_iterations = *inner_iterations;
  if (outer_iterations) p.outer_iterations = *outer_iterations;
  return p;
}

// ---------------------------------------------------------------- digests

namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) {
      throw Error("cannot initialise SHA-256");
    }
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(const char* data, std::size_t n) { EVP_DigestUpdate(ctx_, data, n); }

  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_, md, &len);
    std::string out;
    for (unsigned i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
    return out;
  }

 private:
  EVP_MD_CTX* ctx_;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  Sha256 h;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

// ---------------------------------------------------------------- manifest

namespace {

json stl_json(const StlParams& p) {
  return {{"period", p.period},
          {"seasonal_span", p.seasonal_span},
          {"trend_span", p.trend_span},
          {"lowpass_span", p.lowpass_span},
          {"seasonal_degree", p.seasonal_degree},
          {"trend_degree", p.trend_degree},
          {"lowpass_degree", p.lowpass_degree},
          {"inner_iterations", p.inner_iterations},
          {"outer_iterations", p.outer_iterations}};
}

StlParams stl_from_json(const json& j) {
  StlParams p;
  p.period = j.at("period").get<int>();
  p.seasonal_span = j.at("seasonal_span").get<int>();
  p.trend_span = j.at("trend_span").get<int>();
  p.lowpass_span = j.at("lowpass_span").get<int>();
  p.seasonal_degree = j.at("seasonal_degree").get<int>();
  p.trend_degree = j.at("trend_degree").get<int>();
  p.lowpass_degree = j.at("lowpass_degree").get<int>();
  p.inner_iterations = j.at("inner_iterations").get<int>();
  p.outer_iterations = j.at("outer_iterations").get<int>();
  return p;
}

json config_json(const StudyConfig& c) {
  json locs = json::array();
  for (const LocalityConfig& l : c.localities) {
    locs.push_back({{"id", l.id},
                    {"name", l.name},
                    {"country_region_code", l.selector.country_region_code},
                    {"sub_region_1", l.selector.sub_region_1},
                    {"sub_region_2", l.selector.sub_region_2},
                    {"metro_area", l.selector.metro_area},
                    {"wave1", format_date(l.wave1_restriction)},
                    {"wave2", format_date(l.wave2_restriction)}});
  }
  return {{"period_length_days", c.period_length_days},
          {"window_length_days", c.window_length_days},
          {"epsilon", c.epsilon},
          {"max_gap_days", c.max_gap_days},
          {"stl", stl_json(c.stl)},
          {"localities", locs}};
}

StudyConfig config_from_json(const json& j) {
  StudyConfig c;
  c.period_length_days = j.at("period_length_days").get<int>();
  c.window_length_days = j.at("window_length_days").get<int>();
  c.epsilon = j.at("epsilon").get<double>();
  c.max_gap_days = j.at("max_gap_days").get<int>();
  c.stl = stl_from_json(j.at("stl"));
  for (const json& l : j.at("localities")) {
    LocalityConfig loc;
    loc.id = l.at("id").get<std::string>();
    loc.name = l.at("name").get<std::string>();
    loc.selector = {l.at("country_region_code").get<std::string>(),
                    l.at("sub_region_1").get<std::string>(),
                    l.at("sub_region_2").get<std::string>(),
                    l.at("metro_area").get<std::string>()};
    loc.wave1_restriction = parse_date(l.at("wave1").get<std::string>());
    loc.wave2_restriction = parse_date(l.at("wave2").get<std::string>());
    c.localities.push_back(std::move(loc));
  }
  validate(c);
  return c;
}

}  // namespace

std::string to_json(const RunManifest& m) {
  json outputs = json::array();
  for (const ArtifactDigest& a : m.outputs) outputs.push_back({{"path", a.path}, {"sha256", a.sha256}});
  json j = {{"tool", "cmrwave"},
            {"version", m.tool_version},
            {"inputs",
             {{"cmr", {{"path", m.cmr_path}, {"sha256", m.cmr_sha256}}},
              {"config", {{"path", m.config_path}, {"sha256", m.config_sha256}}}}},
            {"config", config_json(m.config)},
            {"options", {{"diagnostics", m.diagnostics}, {"keep_going", m.keep_going}}},
            {"outputs", outputs},
            {"failures", m.failures}};
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    RunManifest m;
    m.tool_version = j.at("version").get<std::string>();
    m.cmr_path = j.at("inputs").at("cmr").at("path").get<std::string>();
    m.cmr_sha256 = j.at("inputs").at("cmr").at("sha256").get<std::string>();
    m.config_path = j.at("inputs").at("config").at("path").get<std::string>();
    m.config_sha256 = j.at("inputs").at("config").at("sha256").get<std::string>();
    m.config = config_from_json(j.at("config"));
    m.diagnostics = j.at("options").at("diagnostics").get<bool>();
    m.keep_going = j.at("options").at("keep_going").get<bool>();
    for (const json& o : j.at("outputs")) {
      m.outputs.push_back({o.at("path").get<std::string>(), o.at("sha256").get<std::string>()});
    }
    m.failures = j.at("failures").get<std::map<std::string, std::string>>();
    return m;
  } catch (const json::exception& e) {
    throw SchemaError(fmt::format("malformed run manifest: {}", e.what()));
  }
}

// ---------------------------------------------------------------- analysis

namespace {

ArtifactTree locality_artifacts(const LocalitySeries& raw, const LocalityConfig& loc,
                                const StudyConfig& config, bool diagnostics) {
  const PreparedLocality prepared = prepare_locality(raw, loc, config);
  const ComparisonReport report = compare_waves(prepared.series, loc, config);

  ArtifactTree out;
  const std::string dir = loc.id + "/";
  {
    std::ostringstream ss;
    write_report(ss, report);
    out[dir + "report.txt"] = ss.str();
  }
  out[dir + "report_table.txt"] = report_table(report, TableFormat::Plain);
  out[dir + "report_table.csv"] = report_table(report, TableFormat::Csv);
  for (const ComparisonRecord& r : report.records) {
    RadarOptions opts;
    opts.title = r.window_index == 0
                     ? fmt::format("{}: whole {}-day period", loc.name, r.length_days)
                     : fmt::format("{}: days {}-{}", loc.name, r.start_offset_days,
                                   r.start_offset_days + r.length_days - 1);
    const std::string name = r.window_index == 0
                                 ? std::string("radar_whole.svg")
                                 : fmt::format("radar_window_{}.svg", r.window_index);
    out[dir + name] = radar_chart(r.wave1, r.wave2, opts);
  }
  SeriesPlotOptions plot;
  plot.period_length_days = config.period_length_days;
  plot.window_length_days = config.window_length_days;
  out[dir + "series.svg"] = series_plot(prepared.series, loc, plot);
  if (diagnostics) {
    std::ostringstream ss;
    write_diagnostics_csv(ss, prepared);
    out[dir + "diagnostics.csv"] = ss.str();
  }
  return out;
}

void write_tree(const fs::path& root, const ArtifactTree& tree) {
  std::vector<fs::path> written;
  std::vector<fs::path> created_dirs;
  try {
    for (const auto& [rel, content] : tree) {
      const fs::path target = root / rel;
      for (fs::path d = target.parent_path(); !d.empty() && !fs::exists(d); d = d.parent_path()) {
        created_dirs.push_back(d);
      }
      fs::create_directories(target.parent_path());
      std::ofstream f(target, std::ios::binary | std::ios::trunc);
      if (!f) throw IoError(fmt::format("cannot write '{}'", target.string()));
      written.push_back(target);
      f << content;
      if (!f.flush()) throw IoError(fmt::format("cannot write '{}'", target.string()));
    }
  } catch (...) {
    std::error_code ec;
    for (const fs::path& p : written) fs::remove(p, ec);
    std::sort(created_dirs.begin(), created_dirs.end(),
              [](const fs::path& a, const fs::path& b) { return a.string().size() > b.string().size(); });
    for (const fs::path& d : created_dirs) fs::remove(d, ec);
    throw;
  }
}

RunResult execute(const MobilityData& data, RunManifest manifest, const fs::path& out_dir,
                  unsigned jobs) {
  RunResult result;
  ArtifactTree tree = build_artifacts(data, manifest.config, manifest.diagnostics,
                                      manifest.keep_going, jobs, manifest.failures);
  for (const auto& [id, msg] : manifest.failures) {
    result.errors.push_back(fmt::format("locality '{}': {}", id, msg));
  }
  if (!manifest.failures.empty() && !manifest.keep_going) {
    result.exit_code = 1;
    result.manifest = std::move(manifest);
    return result;
  }
  for (const auto& [path, content] : tree) manifest.outputs.push_back({path, sha256_hex(content)});
  tree["manifest.json"] = to_json(manifest);
  write_tree(out_dir, tree);
  result.exit_code = manifest.failures.empty() ? 0 : 1;
  result.manifest = std::move(manifest);
  return result;
}

MobilityData load_cmr(const fs::path& path, const StudyConfig& config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open CMR file '{}'", path.string()));
  return parse_cmr_csv(in, config.localities);
}

}  // namespace

ArtifactTree build_artifacts(const MobilityData& data, const StudyConfig& config,
                             bool diagnostics, bool keep_going, unsigned jobs,
                             std::map<std::string, std::string>& failures) {
  const std::size_t n = config.localities.size();
  std::vector<ArtifactTree> trees(n);
  std::vector<std::string> errors(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      if (abort) return;
      const LocalityConfig& loc = config.localities[i];
      try {
        auto it = data.find(loc.id);
        if (it == data.end()) {
          throw SelectionError(fmt::format("no data for locality '{}'", loc.id));
        }
        trees[i] = locality_artifacts(it->second, loc, config, diagnostics);
      } catch (const std::exception& e) {
        errors[i] = e.what();
        if (!keep_going) abort = true;
      }
    }
  };

  unsigned workers = jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : jobs;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  pool.clear();

  ArtifactTree merged;
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i].empty()) failures[config.localities[i].id] = errors[i];
    else merged.merge(trees[i]);
  }
  return merged;
}

RunResult run_analyze(const AnalyzeOptions& options) {
  const std::string config_text = read_file(options.config_path);
  std::istringstream config_stream(config_text);
  StudyConfig config = load_study_config(config_stream);
  config.stl = options.stl.apply(config.stl);
  if (options.epsilon) config.epsilon = *options.epsilon;
  validate(config);

  RunManifest manifest;
  manifest.tool_version = std::string(kToolVersion);
  manifest.cmr_path = options.cmr_path.string();
  manifest.cmr_sha256 = sha256_file(options.cmr_path);
  manifest.config_path = options.config_path.string();
  manifest.config_sha256 = sha256_hex(config_text);
  manifest.config = config;
  manifest.diagnostics = options.diagnostics;
  manifest.keep_going = options.keep_going;

  const MobilityData data = load_cmr(options.cmr_path, config);
  return execute(data, std::move(manifest), options.out_dir, options.jobs);
}

RunResult run_reproduce(const fs::path& manifest_path, const fs::path& out_dir, unsigned jobs) {
  const RunManifest recorded = manifest_from_json(read_file(manifest_path));
  if (sha256_file(recorded.cmr_path) != recorded.cmr_sha256) {
    throw ValidationError(fmt::format("CMR input '{}' does not match the manifest digest",
                                      recorded.cmr_path));
  }
  if (sha256_file(recorded.config_path) != recorded.config_sha256) {
    throw ValidationError(fmt::format("config '{}' does not match the manifest digest",
                                      recorded.config_path));
  }
  RunManifest fresh = recorded;
  fresh.outputs.clear();
  fresh.failures.clear();
  const MobilityData data = load_cmr(recorded.cmr_path, recorded.config);
  RunResult result = execute(data, std::move(fresh), out_dir, jobs);
  if (result.manifest.outputs.size() != recorded.outputs.size()) {
    result.errors.push_back("reproduced run produced a different set of outputs");
    result.exit_code = 1;
    return result;
  }
  for (std::size_t i = 0; i < recorded.outputs.size(); ++i) {
    const ArtifactDigest& a = recorded.outputs[i];
    const ArtifactDigest& b = result.manifest.outputs[i];
    if (a.path != b.path || a.sha256 != b.sha256) {
      result.errors.push_back(fmt::format("output '{}' differs from the recorded run", a.path));
      result.exit_code = 1;
    }
  }
  return result;
}

// ---------------------------------------------------------------- decompose

SingleSeries read_single_series(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("series input is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  auto find = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    return std::nullopt;
  };
  const auto col_value = find("value");
  if (!col_value) throw SchemaError("series input is missing required column 'value'");
  const auto col_date = find("date");

  SingleSeries out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (cells.size() != header.size()) {
      throw RowError(line_no, fmt::format("expected {} fields, found {}", header.size(), cells.size()));
    }
    const std::string& v = cells[*col_value];
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size()) {
      throw RowError(line_no, fmt::format("unparseable value '{}'", v));
    }
    out.values.push_back(x);
    if (col_date) out.dates.push_back(cells[*col_date]);
  }
  return out;
}

void run_decompose(const DecomposeOptions& options, std::ostream& stdout_stream) {
  std::ifstream in(options.input, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", options.input.string()));
  const SingleSeries series = read_single_series(in);
  const StlParams params = options.stl.apply(default_stl_params());
  const StlResult r = stl_decompose(series.values, params);

  std::ostringstream out;
  out << "date,value,trend,seasonal,remainder,weight\n";
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    out << fmt::format("{},{},{},{},{},{}\n", series.dates.empty() ? std::to_string(i) : series.dates[i],
                       series.values[i], r.trend[i], r.seasonal[i], r.remainder[i],
                       r.robustness_weights[i]);
  }
  if (options.output) {
    std::ofstream f(*options.output, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError(fmt::format("cannot write '{}'", options.output->string()));
    f << out.str();
  } else {
    stdout_stream << out.str();
  }
}

}  // namespace cmrwave
