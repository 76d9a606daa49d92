#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "faasbench/app_model.hpp"
#include "faasbench/distribution.hpp"

namespace faasbench {

// Parameters of one simulated FaaS platform.
struct PlatformSpec {
  std::string id;
  DurationDistribution cold_start_delay;
  Micros keep_alive = 10 * 60 * kMicrosPerSecond;
  // One-way latency keyed by peer platform id or "loadgen". Keys naming an
  // external service give the full operation latency of that service as
  // seen from this platform.
  std::map<std::string, DurationDistribution> network;
  // Publisher start to triggered function start.
  DurationDistribution trigger_delay;
  // Execution time of the synthesized publisher function.
  DurationDistribution publisher_exec;
  std::optional<std::int64_t> log_line_rate_limit;  // lines per second; nullopt = unlimited
  Micros clock_offset = 0;                          // added to logged timestamps only
  double bandwidth_bytes_per_ms = 0;                // 0 = payload size does not affect latency
  std::string memory_label;                         // recorded, no performance effect

  friend bool operator==(const PlatformSpec&, const PlatformSpec&) = default;
};

struct ServiceBinding {
  std::string platform;       // platform hosting the service
  std::string latency_class;  // descriptive label, e.g. "same-region"

  friend bool operator==(const ServiceBinding&, const ServiceBinding&) = default;
};

struct DeploymentConfig {
  std::string benchmark;
  std::vector<PlatformSpec> platforms;
  std::map<std::string, std::string> assignment;  // function -> platform id
  std::map<std::string, ServiceBinding> service_bindings;
  bool tracing_enabled = true;
  std::int64_t tracing_overhead_bytes = 64;  // constant-size tracing token per call
  // Replaces every compute step's distribution when set.
  std::optional<DurationDistribution> compute_override;

  const PlatformSpec* FindPlatform(std::string_view id) const;
  PlatformSpec* FindPlatform(std::string_view id);

  friend bool operator==(const DeploymentConfig&, const DeploymentConfig&) = default;
};

std::string DeploymentConfigToJson(const DeploymentConfig& cfg);
DeploymentConfig DeploymentConfigFromJson(std::string_view text);
DeploymentConfig LoadDeploymentConfigFile(const std::filesystem::path& path);

// A body step with every name resolved to an endpoint.
struct ResolvedStep {
  StepKind kind = StepKind::kCompute;
  DurationDistribution compute_time;
  std::string target;           // canonical function name (call/publish)
  std::string route;
  std::string endpoint;         // call: callee endpoint; publish: publisher endpoint on the callee's platform
  std::string target_endpoint;  // publish: endpoint of the triggered function
  std::int64_t payload_bytes = 0;
  std::string service;
  std::string key;
  std::int64_t value_bytes = 0;
  std::vector<std::vector<ResolvedStep>> branches;

  friend bool operator==(const ResolvedStep&, const ResolvedStep&) = default;
};

using ResolvedSteps = std::vector<ResolvedStep>;

struct DeployedFunction {
  std::string name;
  std::string endpoint;
  TriggerKind trigger = TriggerKind::kHttpSync;
  bool entry_point = false;
  bool publisher = false;
  ResolvedSteps body;
  std::map<std::string, ResolvedSteps> routes;

  const ResolvedSteps* FindBody(std::string_view route) const;

  friend bool operator==(const DeployedFunction&, const DeployedFunction&) = default;
};

struct DeploymentArtifact {
  std::string platform_id;
  std::vector<DeployedFunction> functions;
  bool tracing_enabled = true;

  friend bool operator==(const DeploymentArtifact&, const DeploymentArtifact&) = default;
};

struct EndpointBinding {
  std::string platform;
  std::string endpoint;

  friend bool operator==(const EndpointBinding&, const EndpointBinding&) = default;
};

struct DeploymentPlan {
  std::string application;
  std::vector<DeploymentArtifact> artifacts;           // one per platform hosting functions
  std::map<std::string, EndpointBinding> endpoint_table;  // canonical name -> endpoint
  std::map<std::string, std::string> publisher_table;     // platform id -> publisher endpoint
  std::vector<PlatformSpec> platforms;
  std::map<std::string, ServiceBinding> service_bindings;
  std::int64_t tracing_overhead_bytes = 64;

  const EndpointBinding* Resolve(std::string_view function_name) const;
  const PlatformSpec* FindPlatform(std::string_view id) const;

  friend bool operator==(const DeploymentPlan&, const DeploymentPlan&) = default;
};

std::string EndpointFor(std::string_view platform_id, std::string_view function_name);
std::string PublisherNameFor(std::string_view platform_id);

// Resolves `app` against `cfg`. Errors: InvalidApplication,
// UnassignedFunction, UnknownPlatform, MissingServiceBinding,
// MissingNetworkLatency, InvalidConfig.
DeploymentPlan Compile(const ApplicationSpec& app, const DeploymentConfig& cfg);

// The minimal platform interface: deploy, read standard logs, remove.
class PlatformAdapter {
 public:
  virtual ~PlatformAdapter() = default;
  virtual void Deploy(const DeploymentArtifact& artifact) = 0;
  virtual std::vector<std::string> CollectLogs(std::string_view run_id) = 0;
  virtual void Remove(const DeploymentArtifact& artifact) = 0;
};

using AdapterMap = std::map<std::string, PlatformAdapter*>;

class RunIdSource {
 public:
  explicit RunIdSource(std::uint64_t seed) : rng_(seed) {}
  std::string Next();

 private:
  Rng rng_;
};

struct RunHandle {
  std::string run_id;
  std::vector<DeploymentArtifact> deployed;
  bool torn_down = false;
};

// Deploys every artifact; on failure removes what was already deployed and
// throws Error(kAdapterFailure, platform).
RunHandle DeployAll(const DeploymentPlan& plan, const AdapterMap& adapters, RunIdSource& run_ids);
RunHandle DeployAll(const DeploymentPlan& plan, const AdapterMap& adapters, std::string run_id);

struct TeardownOutcome {
  std::string platform;
  bool removed = false;
  std::string error;
};

struct TeardownReport {
  std::vector<TeardownOutcome> outcomes;
  bool noop = false;
  bool ok() const;
};

TeardownReport Teardown(RunHandle& handle, const AdapterMap& adapters);

}  // namespace faasbench
