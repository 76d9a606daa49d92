#include "faasbench/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace faasbench {

using nlohmann::json;

namespace {

std::uint64_t Fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string WallClock() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void WriteFile(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, path.string(), "cannot write");
  out << content;
  if (!out) throw Error(ErrorCode::kIo, path.string(), "write failed");
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, path.string(), "cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int ExitCodeFor(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kUnknownBenchmark:
    case ErrorCode::kInvalidApplication:
    case ErrorCode::kUnassignedFunction:
    case ErrorCode::kUnknownPlatform:
    case ErrorCode::kMissingServiceBinding:
    case ErrorCode::kMissingNetworkLatency:
    case ErrorCode::kUnknownRecipe:
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kInvalidProfile:
    case ErrorCode::kIo:
      return kExitConfigError;
    case ErrorCode::kAdapterFailure:
      return kExitDeployFailure;
    case ErrorCode::kNotDeployed:
    case ErrorCode::kUnknownEndpoint:
    case ErrorCode::kNotAsync:
    case ErrorCode::kNoServiceBinding:
      return kExitRunFailure;
    case ErrorCode::kMalformedRecord:
    case ErrorCode::kUnsupportedSchemaVersion:
    case ErrorCode::kIncompleteTree:
      return kExitAnalysisFailure;
  }
  return kExitRunFailure;
}

std::string DeriveRunId(const ApplicationSpec& app, const DeploymentConfig& cfg, const LoadProfile& profile,
                        std::uint64_t seed) {
  const std::uint64_t inputs =
      Fnv1a(ApplicationToJson(app) + "\n" + DeploymentConfigToJson(cfg) + "\n" + LoadProfileToJson(profile));
  RunIdSource ids(DeriveSeed(seed, "run-id") ^ inputs);
  return ids.Next();
}

std::string JoinLines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

SimulationResult Simulate(const ApplicationSpec& app, const DeploymentConfig& cfg, const LoadProfile& profile,
                          std::uint64_t seed, std::string run_id) {
  const DeploymentPlan plan = Compile(app, cfg);
  ValidateProfile(profile, app);
  if (run_id.empty()) run_id = DeriveRunId(app, cfg, profile, seed);

  SimWorld world(plan, seed);
  std::vector<std::unique_ptr<SimPlatformAdapter>> owned;
  AdapterMap adapters;
  for (const auto& p : plan.platforms) {
    owned.push_back(std::make_unique<SimPlatformAdapter>(world, p.id));
    adapters[p.id] = owned.back().get();
  }

  SimulationResult result;
  RunHandle handle = DeployAll(plan, adapters, run_id);
  result.run_id = handle.run_id;
  world.set_run_id(handle.run_id);
  try {
    result.schedule = ScheduleProfile(profile, seed);
    result.stats = Execute(result.schedule, profile, world);
    world.RunUntilIdle();
  } catch (...) {
    Teardown(handle, adapters);
    throw;
  }

  result.raw_lines.emplace_back(kTraceHeader);
  for (const auto& p : plan.platforms) {
    for (auto& line : adapters.at(p.id)->CollectLogs(handle.run_id)) result.raw_lines.push_back(std::move(line));
  }
  for (auto& line : world.SinkFor(kLoadgenPlatform).LinesForRun(handle.run_id)) {
    result.raw_lines.push_back(std::move(line));
  }
  for (const auto& p : plan.platforms) {
    const LogSink& sink = world.SinkFor(p.id);
    result.dropped[p.id] = sink.dropped();
    result.accepted[p.id] = sink.accepted();
    result.raw_lines.push_back(FormatDropLine(p.id, sink.dropped()));
  }
  for (const auto& w : result.schedule.phases) {
    result.raw_lines.push_back(FormatPhaseLine(w.index, PhaseKindName(w.kind), w.start, w.end));
  }
  result.truth = world.truth();
  result.teardown = Teardown(handle, adapters);
  return result;
}

namespace {

json ManifestJson(const RunOptions& o, const std::string& run_id, const std::filesystem::path& run_dir) {
  json m;
  m["runId"] = run_id;
  m["benchmark"] = o.app.name;
  m["version"] = std::string(kVersion);
  m["seed"] = o.seed;
  m["scaleFactor"] = o.profile.scale_factor;
  m["scaleDurations"] = o.profile.scale_durations;
  m["configSource"] = o.config_source;
  m["profileSource"] = o.profile_source;
  m["outputDir"] = run_dir.string();
  m["maxParseErrors"] = o.max_parse_errors;
  m["application"] = json::parse(ApplicationToJson(o.app));
  m["config"] = json::parse(DeploymentConfigToJson(o.config));
  m["profile"] = json::parse(LoadProfileToJson(o.profile));
  m["startedAt"] = WallClock();
  return m;
}

std::filesystem::path UniqueRunDir(const std::filesystem::path& out, std::string& run_id) {
  std::filesystem::path dir = out / run_id;
  for (int i = 2; std::filesystem::exists(dir); ++i) {
    dir = out / (run_id + "-" + std::to_string(i));
  }
  run_id = dir.filename().string();
  return dir;
}

}  // namespace

RunOutcome RunBenchmark(const RunOptions& o) {
  RunOutcome outcome;
  const auto wall_start = std::chrono::steady_clock::now();
  json manifest;
  auto finish = [&](int code, const std::string& error) {
    outcome.exit_code = code;
    outcome.error = error;
    if (!outcome.run_dir.empty() && !manifest.is_null()) {
      manifest["finishedAt"] = WallClock();
      manifest["exitCode"] = code;
      manifest["wallSeconds"] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
      if (!error.empty()) manifest["error"] = error;
      try {
        WriteFile(outcome.run_dir / "manifest.json", manifest.dump(2) + "\n");
      } catch (const Error&) {
        // The run result stands even if the manifest cannot be completed.
      }
    }
    return outcome;
  };

  // Configuration stage: everything that can be checked without a platform.
  std::string run_id;
  try {
    Compile(o.app, o.config);
    ValidateProfile(o.profile, o.app);
    run_id = o.run_id.empty() ? DeriveRunId(o.app, o.config, o.profile, o.seed) : o.run_id;
    std::filesystem::create_directories(o.out_dir);
    outcome.run_dir = UniqueRunDir(o.out_dir, run_id);
    outcome.run_id = run_id;
    std::filesystem::create_directories(outcome.run_dir / "reports");
    manifest = ManifestJson(o, run_id, outcome.run_dir);
    WriteFile(outcome.run_dir / "manifest.json", manifest.dump(2) + "\n");
  } catch (const Error& e) {
    return finish(kExitConfigError, e.what());
  } catch (const std::exception& e) {
    return finish(kExitConfigError, e.what());
  }

  SimulationResult sim;
  try {
    sim = Simulate(o.app, o.config, o.profile, o.seed, run_id);
  } catch (const Error& e) {
    const int code = e.code() == ErrorCode::kAdapterFailure ? kExitDeployFailure : kExitRunFailure;
    return finish(code, e.what());
  } catch (const std::exception& e) {
    return finish(kExitRunFailure, e.what());
  }
  manifest["workflows"] = sim.stats.workflows;
  manifest["teardownOk"] = sim.teardown.ok();

  try {
    WriteFile(outcome.run_dir / "raw.log", JoinLines(sim.raw_lines));
  } catch (const Error& e) {
    return finish(kExitRunFailure, e.what());
  }

  try {
    const ParsedLog log = ParseLogs(sim.raw_lines);
    outcome.analysis = Analyze(log);
    WriteReports(*outcome.analysis, outcome.run_dir / "reports");
    if (log.report.parse_errors > o.max_parse_errors) {
      return finish(kExitAnalysisFailure, std::to_string(log.report.parse_errors) + " parse errors");
    }
  } catch (const std::exception& e) {
    return finish(kExitAnalysisFailure, e.what());
  }
  return finish(kExitOk, {});
}

RunOptions OptionsFromManifest(const std::filesystem::path& manifest_path) {
  json m;
  try {
    m = json::parse(ReadFile(manifest_path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, manifest_path.string(), e.what());
  }
  try {
    RunOptions o;
    o.app = ApplicationFromJson(m.at("application").dump());
    o.config = DeploymentConfigFromJson(m.at("config").dump());
    o.profile = LoadProfileFromJson(m.at("profile").dump());
    o.seed = m.at("seed").get<std::uint64_t>();
    o.config_source = m.value("configSource", std::string());
    o.profile_source = m.value("profileSource", std::string());
    o.max_parse_errors = m.value("maxParseErrors", std::int64_t{0});
    o.run_id = m.at("runId").get<std::string>();
    return o;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, manifest_path.string(), e.what());
  }
}

AnalyzeOutcome AnalyzeLogFile(const std::filesystem::path& log_path, const std::filesystem::path& report_dir,
                              std::int64_t max_parse_errors) {
  AnalyzeOutcome outcome;
  try {
    const ParsedLog log = ParseLogFile(log_path);
    outcome.analysis = Analyze(log);
    WriteReports(*outcome.analysis, report_dir);
    if (log.report.parse_errors > max_parse_errors) {
      outcome.exit_code = kExitAnalysisFailure;
      outcome.error = std::to_string(log.report.parse_errors) + " parse errors";
    }
  } catch (const Error& e) {
    outcome.exit_code = e.code() == ErrorCode::kIo ? kExitConfigError : kExitAnalysisFailure;
    outcome.error = e.what();
  } catch (const std::exception& e) {
    outcome.exit_code = kExitAnalysisFailure;
    outcome.error = e.what();
  }
  return outcome;
}

}  // namespace faasbench
