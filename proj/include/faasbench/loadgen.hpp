#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "faasbench/app_model.hpp"
#include "faasbench/distribution.hpp"

namespace faasbench {

class SimWorld;

// One request of a workflow: a root call to an entry function, then a
// think time before the next step.
struct WorkflowStep {
  std::string entry;
  std::string route;
  std::int64_t payload_bytes = 0;
  DurationDistribution think;

  friend bool operator==(const WorkflowStep&, const WorkflowStep&) = default;
};

struct Workflow {
  std::string name;
  std::vector<WorkflowStep> steps;

  friend bool operator==(const Workflow&, const Workflow&) = default;
};

enum class PhaseKind { kConstantRate, kPeriodic, kPause, kBurst };

std::string_view PhaseKindName(PhaseKind kind);

struct MixEntry {
  std::string workflow;
  double weight = 1.0;

  friend bool operator==(const MixEntry&, const MixEntry&) = default;
};

struct PeriodicEntry {
  std::string workflow;
  Micros interval = 0;
  std::optional<Micros> offset;  // first arrival after phase start; defaults to interval

  friend bool operator==(const PeriodicEntry&, const PeriodicEntry&) = default;
};

struct Phase {
  PhaseKind kind = PhaseKind::kPause;
  std::string name;
  Micros duration = 0;
  double rate = 0;               // constantRate: workflows per second
  std::int64_t total_flows = 0;  // burst
  std::vector<MixEntry> mix;     // constantRate, burst
  std::vector<PeriodicEntry> entries;

  friend bool operator==(const Phase&, const Phase&) = default;
};

// Without scale_durations, scale_factor multiplies rates and flow counts
// and divides periodic intervals. With it, durations, pauses and flow
// counts are multiplied and rates and intervals are kept.
struct LoadProfile {
  std::string name;
  std::vector<Workflow> workflows;
  std::vector<Phase> phases;
  double scale_factor = 1.0;
  bool scale_durations = false;

  const Workflow* FindWorkflow(std::string_view name) const;

  friend bool operator==(const LoadProfile&, const LoadProfile&) = default;
};

// Default profile for a built-in benchmark. Throws UnknownBenchmark.
LoadProfile BuiltinProfile(std::string_view benchmark);

std::string LoadProfileToJson(const LoadProfile& profile);
LoadProfile LoadProfileFromJson(std::string_view text);
LoadProfile LoadProfileFile(const std::filesystem::path& path);

// Structural checks. Throws Error(kInvalidProfile).
void ValidateProfile(const LoadProfile& profile);
// Also checks that every step enters the application through an entry
// point and names an existing route.
void ValidateProfile(const LoadProfile& profile, const ApplicationSpec& app);

struct Arrival {
  Micros at = 0;
  std::size_t workflow = 0;  // index into LoadProfile::workflows
  std::size_t phase = 0;

  friend bool operator==(const Arrival&, const Arrival&) = default;
};

struct PhaseWindow {
  std::size_t index = 0;
  PhaseKind kind = PhaseKind::kPause;
  std::string name;
  Micros start = 0;
  Micros end = 0;

  friend bool operator==(const PhaseWindow&, const PhaseWindow&) = default;
};

struct LoadSchedule {
  std::vector<Arrival> arrivals;  // sorted by time
  std::vector<PhaseWindow> phases;
};

// Open-loop arrival synthesis. constantRate phases place
// round(rate * duration) arrivals as a Poisson process conditioned on that
// count; periodic entries fire at offset + k * interval up to the phase
// end; bursts are evenly spread.
LoadSchedule ScheduleProfile(const LoadProfile& profile, std::uint64_t seed);

struct ExecutionStats {
  std::int64_t workflows = 0;
  std::int64_t root_calls = 0;
};

// Schedules every workflow instance into `world`. Each step is a root call
// with a fresh context. Run the world afterwards. Throws UnknownEndpoint
// when an entry function is not in the plan.
ExecutionStats Execute(const LoadSchedule& schedule, const LoadProfile& profile, SimWorld& world);

}  // namespace faasbench
