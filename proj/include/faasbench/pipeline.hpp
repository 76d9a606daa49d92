#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "faasbench/analyzer.hpp"
#include "faasbench/app_model.hpp"
#include "faasbench/deployment.hpp"
#include "faasbench/loadgen.hpp"
#include "faasbench/sim.hpp"

namespace faasbench {

inline constexpr std::string_view kVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfigError = 2,
  kExitDeployFailure = 3,
  kExitRunFailure = 4,
  kExitAnalysisFailure = 5,
};

// Prebuilt experiment setups. Latency parameters are illustrative values
// in the ranges commonly reported for public clouds, not measurements.
struct Recipe {
  std::string name;
  std::string description;
  DeploymentConfig config;
  LoadProfile profile;
};

std::vector<std::string> RecipeNames();
// Throws UnknownRecipe.
Recipe LoadRecipe(std::string_view name);
// The recipe `run <benchmark>` falls back to when no config is given.
std::string DefaultRecipeFor(std::string_view benchmark);

// In-memory result of compile -> deploy -> load -> collect -> teardown.
struct SimulationResult {
  std::string run_id;
  std::vector<std::string> raw_lines;  // complete raw log, header first
  GroundTruth truth;
  LoadSchedule schedule;
  ExecutionStats stats;
  std::map<std::string, std::int64_t> dropped;
  std::map<std::string, std::int64_t> accepted;
  TeardownReport teardown;
};

// Deterministic run id derived from the seed and the inputs.
std::string DeriveRunId(const ApplicationSpec& app, const DeploymentConfig& cfg, const LoadProfile& profile,
                        std::uint64_t seed);

// Runs one simulated benchmark. Errors propagate as Error; teardown runs
// on every path after deployment. `run_id` empty = DeriveRunId.
SimulationResult Simulate(const ApplicationSpec& app, const DeploymentConfig& cfg, const LoadProfile& profile,
                          std::uint64_t seed, std::string run_id = {});

std::string JoinLines(const std::vector<std::string>& lines);

struct RunOptions {
  ApplicationSpec app;
  DeploymentConfig config;
  LoadProfile profile;
  std::string config_source;
  std::string profile_source;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "out";
  std::int64_t max_parse_errors = 0;
  std::string run_id;  // forced run id (manifest replay); empty = derived
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::string run_id;
  std::filesystem::path run_dir;
  std::string error;
  std::optional<Analysis> analysis;
};

// Writes out/<runId>/{manifest.json, raw.log, reports/}. The manifest is
// written before deployment and completed at the end.
RunOutcome RunBenchmark(const RunOptions& options);

// Reads a manifest written by RunBenchmark and rebuilds its options.
RunOptions OptionsFromManifest(const std::filesystem::path& manifest_path);

struct AnalyzeOutcome {
  int exit_code = kExitOk;
  std::string error;
  std::optional<Analysis> analysis;
};

AnalyzeOutcome AnalyzeLogFile(const std::filesystem::path& log_path, const std::filesystem::path& report_dir,
                              std::int64_t max_parse_errors);

int ExitCodeFor(const Error& e);

}  // namespace faasbench
