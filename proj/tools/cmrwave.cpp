// cmrwave: compare community mobility reduction between two lockdown waves.
//
//   cmrwave analyze   --cmr <csv> --config <study config> --out <dir>
//   cmrwave decompose --input <series csv> --period 7 [--output <csv>]
//   cmrwave reproduce --manifest <manifest.json> --out <dir>
//
// Exit status: 0 success, 1 data or validation error, 2 usage error.

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"

#include "cmrwave/error.hpp"
#include "cmrwave/pipeline.hpp"

namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

void add_stl_flags(CLI::App* cmd, cmrwave::StlOverrides& stl, bool with_period) {
  if (with_period) cmd->add_option("--stl-period", stl.period, "Seasonal period in days");
  cmd->add_option("--stl-seasonal-span", stl.seasonal_span, "Seasonal smoother span (odd, >= 7)");
  cmd->add_option("--stl-trend-span", stl.trend_span, "Trend smoother span (odd)");
  cmd->add_option("--stl-lowpass-span", stl.lowpass_span, "Low-pass smoother span (odd)");
  cmd->add_option("--stl-seasonal-degree", stl.seasonal_degree, "0, 1 or 2");
  cmd->add_option("--stl-trend-degree", stl.trend_degree, "0, 1 or 2");
  cmd->add_option("--stl-lowpass-degree", stl.lowpass_degree, "0, 1 or 2");
  cmd->add_option("--stl-inner", stl.inner_iterations, "Inner loop passes");
  cmd->add_option("--stl-outer", stl.outer_iterations, "Robustness iterations");
}

int report(const cmrwave::RunResult& r) {
  for (const auto& e : r.errors) std::cerr << "cmrwave: " << e << '\n';
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-objective comparison of mobility reduction across two lockdown waves"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cmrwave::kToolVersion));

  cmrwave::AnalyzeOptions analyze;
  std::string out_dir;
  auto* cmd_analyze = app.add_subcommand("analyze", "Run the full pipeline for every configured locality");
  cmd_analyze->add_option("--cmr", analyze.cmr_path, "Mobility report CSV")->required();
  cmd_analyze->add_option("--config", analyze.config_path, "Study configuration file")->required();
  cmd_analyze->add_option("--out", out_dir,
                          std::string("Output directory (default: $") + cmrwave::kOutDirEnv + ")");
  cmd_analyze->add_option("--epsilon", analyze.epsilon, "Dominance equality tolerance");
  cmd_analyze->add_flag("--diagnostics", analyze.diagnostics, "Write per-locality decomposition CSVs");
  cmd_analyze->add_flag("--keep-going", analyze.keep_going, "Continue past failing localities");
  cmd_analyze->add_option("--jobs", analyze.jobs, "Worker threads (0 = all cores)");
  add_stl_flags(cmd_analyze, analyze.stl, true);

  cmrwave::DecomposeOptions decompose;
  std::string decompose_out;
  int period = 7;
  auto* cmd_decompose = app.add_subcommand("decompose", "STL-decompose a single series");
  cmd_decompose->add_option("--input", decompose.input, "CSV with a 'value' column")->required();
  cmd_decompose->add_option("--period", period, "Seasonal period")->required();
  cmd_decompose->add_option("--output", decompose_out, "Output CSV (default: stdout)");
  add_stl_flags(cmd_decompose, decompose.stl, false);

  std::string manifest_path;
  unsigned reproduce_jobs = 0;
  auto* cmd_reproduce = app.add_subcommand("reproduce", "Repeat a recorded run and verify its outputs");
  cmd_reproduce->add_option("--manifest", manifest_path, "manifest.json of an earlier run")->required();
  cmd_reproduce->add_option("--out", out_dir, "Output directory")->required();
  cmd_reproduce->add_option("--jobs", reproduce_jobs, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*cmd_analyze) {
      if (out_dir.empty()) {
        if (const char* env = std::getenv(cmrwave::kOutDirEnv)) out_dir = env;
      }
      if (out_dir.empty()) {
        std::cerr << "cmrwave analyze: --out is required (or set " << cmrwave::kOutDirEnv << ")\n";
        return kExitUsage;
      }
      analyze.out_dir = out_dir;
      return report(cmrwave::run_analyze(analyze));
    }
    if (*cmd_decompose) {
      decompose.stl.period = period;
      if (!decompose_out.empty()) decompose.output = decompose_out;
      cmrwave::run_decompose(decompose, std::cout);
      return 0;
    }
    if (*cmd_reproduce) {
      return report(cmrwave::run_reproduce(manifest_path, out_dir, reproduce_jobs));
    }
  } catch (const cmrwave::Error& e) {
    std::cerr << "cmrwave: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "cmrwave: unexpected error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
