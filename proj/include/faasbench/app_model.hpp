#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "faasbench/distribution.hpp"

namespace faasbench {

enum class TriggerKind { kHttpSync, kEventAsync };

enum class StepKind { kCompute, kCall, kPublish, kDbGet, kDbSet, kParallel, kReturn };

enum class CallMode { kSync, kAsync };

std::string_view TriggerKindName(TriggerKind kind);
std::string_view StepKindName(StepKind kind);
std::string_view CallModeName(CallMode mode);

// One scripted step of a function body. Only the fields relevant to `kind`
// are meaningful; the factories below set exactly those.
struct BodyStep {
  StepKind kind = StepKind::kCompute;
  DurationDistribution compute_time;              // kCompute
  std::string target;                             // kCall, kPublish
  std::string route;                              // kCall: named alternative body of the target
  std::int64_t payload_bytes = 0;                 // kCall/kPublish request size, kReturn response size
  std::string service;                            // kDbGet, kDbSet
  std::string key;                                // kDbGet, kDbSet
  std::int64_t value_bytes = 0;                   // kDbSet
  std::vector<std::vector<BodyStep>> branches;    // kParallel

  static BodyStep Compute(DurationDistribution time);
  static BodyStep Call(std::string target, std::int64_t payload_bytes = 0, std::string route = {});
  static BodyStep Publish(std::string target, std::int64_t payload_bytes = 0);
  static BodyStep DbGet(std::string service, std::string key);
  static BodyStep DbSet(std::string service, std::string key, std::int64_t value_bytes);
  static BodyStep Parallel(std::vector<std::vector<BodyStep>> branches);
  static BodyStep Return(std::int64_t response_bytes = 0);

  friend bool operator==(const BodyStep&, const BodyStep&) = default;
};

using StepList = std::vector<BodyStep>;

struct FunctionSpec {
  std::string name;
  TriggerKind trigger = TriggerKind::kHttpSync;
  bool entry_point = false;
  StepList body;
  // Named alternative bodies selected by the caller (e.g. the frontend's
  // per-page handlers). An empty route selects `body`.
  std::map<std::string, StepList> routes;

  const StepList* FindBody(std::string_view route) const;

  friend bool operator==(const FunctionSpec&, const FunctionSpec&) = default;
};

struct ApplicationSpec {
  std::string name;
  std::string description;
  std::vector<FunctionSpec> functions;
  std::vector<std::string> external_services;

  const FunctionSpec* Find(std::string_view function_name) const;

  friend bool operator==(const ApplicationSpec&, const ApplicationSpec&) = default;
};

// Publisher functions are synthesized at deployment time under this prefix;
// application functions may not use it.
inline constexpr std::string_view kPublisherPrefix = "publisher.";

enum class ViolationKind {
  kDuplicateName,
  kUnknownTarget,
  kTargetKindMismatch,
  kUnknownRoute,
  kUnknownService,
  kNoEntryPoint,
  kUnreachable,
  kParallelTooFewBranches,
  kReturnNotLast,
  kReservedName,
  kEmptyName,
};

std::string_view ViolationKindName(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string function;  // offending function
  std::string detail;    // e.g. the unknown target name

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string ToString() const;
};

ValidationReport Validate(const ApplicationSpec& app);

struct CallEdge {
  std::string caller;
  std::string callee;
  CallMode mode = CallMode::kSync;

  friend bool operator==(const CallEdge&, const CallEdge&) = default;
};

// Directed multigraph: one edge per call/publish step occurrence, in
// function order, then body before routes (route-name order), depth first.
struct CallGraph {
  std::vector<std::string> nodes;
  std::vector<CallEdge> edges;

  friend bool operator==(const CallGraph&, const CallGraph&) = default;
};

// Throws Error(kInvalidApplication) if `app` does not validate.
CallGraph BuildCallGraph(const ApplicationSpec& app);

// Built-in benchmarks: webshop, smartcity, smartfactory, streaming.
std::vector<std::string> BuiltinBenchmarkNames();
ApplicationSpec LoadBuiltin(std::string_view name);

// JSON-compatible text form; the README describes the schema.
std::string ApplicationToJson(const ApplicationSpec& app);
ApplicationSpec ApplicationFromJson(std::string_view text);
ApplicationSpec LoadApplicationFile(const std::filesystem::path& path);

}  // namespace faasbench
