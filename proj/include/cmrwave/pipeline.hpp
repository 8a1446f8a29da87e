#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cmrwave/ingest.hpp"
#include "cmrwave/stl.hpp"

namespace cmrwave {

inline constexpr std::string_view kToolVersion = "1.0.0";

/// Environment variable consulted when --out is not given.
inline constexpr const char* kOutDirEnv = "CMRWAVE_OUT_DIR";

/// Command-line overrides of the STL settings; unset fields keep the config value.
struct StlOverrides {
  std::optional<int> period;
  std::optional<int> seasonal_span;
  std::optional<int> trend_span;
  std::optional<int> lowpass_span;
  std::optional<int> seasonal_degree;
  std::optional<int> trend_degree;
  std::optional<int> lowpass_degree;
  std::optional<int> inner_iterations;
  std::optional<int> outer_iterations;

  /// Applies the overrides. When the period or seasonal span changes and the
  /// trend or low-pass span is not given explicitly, the derived default is
  /// recomputed.
  StlParams apply(StlParams base) const;
};

struct AnalyzeOptions {
  std::filesystem::path cmr_path;
  std::filesystem::path config_path;
  std::filesystem::path out_dir;
  StlOverrides stl;
  std::optional<double> epsilon;
  bool diagnostics = false;
  bool keep_going = false;
  unsigned jobs = 0;  // 0: one worker per hardware thread
};

struct ArtifactDigest {
  std::string path;  // relative to the output directory
  std::string sha256;
};

/// Everything needed to repeat a run and check its outputs.
struct RunManifest {
  std::string tool_version;
  std::string cmr_path;
  std::string cmr_sha256;
  std::string config_path;
  std::string config_sha256;
  StudyConfig config;  // after command-line overrides
  bool diagnostics = false;
  bool keep_going = false;
  std::vector<ArtifactDigest> outputs;
  std::map<std::string, std::string> failures;  // locality id -> message
};

std::string to_json(const RunManifest& manifest);
RunManifest manifest_from_json(std::string_view text);

struct RunResult {
  int exit_code = 0;
  std::vector<std::string> errors;
  RunManifest manifest;
};

/// In-memory output tree: relative path -> file content.
using ArtifactTree = std::map<std::string, std::string>;

/// Runs the whole analysis for every configured locality and renders all
/// artifacts without touching the filesystem.
ArtifactTree build_artifacts(const MobilityData& data, const StudyConfig& config,
                             bool diagnostics, bool keep_going, unsigned jobs,
                             std::map<std::string, std::string>& failures);

/// ingest -> prepare -> aggregate -> render, writing into options.out_dir.
/// Nothing is left behind in out_dir when the run fails.
RunResult run_analyze(const AnalyzeOptions& options);

/// Re-runs the analysis recorded in a manifest and compares output digests.
RunResult run_reproduce(const std::filesystem::path& manifest_path,
                        const std::filesystem::path& out_dir, unsigned jobs = 0);

struct DecomposeOptions {
  std::filesystem::path input;
  std::optional<std::filesystem::path> output;  // stdout when unset
  StlOverrides stl;
};

/// Reads a single-series CSV (a `value` column and an optional `date`
/// column) and writes date,value,trend,seasonal,remainder,weight.
void run_decompose(const DecomposeOptions& options, std::ostream& stdout_stream);

/// Parses the single-series CSV used by run_decompose.
struct SingleSeries {
  std::vector<std::string> dates;  // empty when the input has no date column
  std::vector<double> values;
};
SingleSeries read_single_series(std::istream& in);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace cmrwave
