#pragma once

#include <gtest/gtest.h>

#include <memory>
#include <string>
#include <vector>

#include "faasbench/pipeline.hpp"

namespace fbtest {

using namespace faasbench;

inline DurationDistribution Ms(double ms) { return DurationDistribution::Fixed(ms); }

inline PlatformSpec ConstPlatform(std::string id, double self_ms, double loadgen_ms, double cold_ms = 0) {
  PlatformSpec p;
  p.id = id;
  p.cold_start_delay = Ms(cold_ms);
  p.network[id] = Ms(self_ms);
  p.network["loadgen"] = Ms(loadgen_ms);
  p.trigger_delay = Ms(0);
  p.publisher_exec = Ms(0);
  return p;
}

inline FunctionSpec Fn(std::string name, StepList body, bool entry = false,
                       TriggerKind trigger = TriggerKind::kHttpSync) {
  FunctionSpec f;
  f.name = std::move(name);
  f.entry_point = entry;
  f.trigger = trigger;
  f.body = std::move(body);
  return f;
}

inline BodyStep Work(double ms) { return BodyStep::Compute(Ms(ms)); }

// Sets every latency-relevant distribution of `cfg` to a constant.
inline void Constantize(DeploymentConfig& cfg, double net_ms, double service_ms, double cold_ms,
                        double trigger_ms, double publisher_ms) {
  for (auto& p : cfg.platforms) {
    for (auto& [peer, d] : p.network) {
      const bool service = cfg.service_bindings.count(peer) > 0;
      d = Ms(service ? service_ms : net_ms);
    }
    p.cold_start_delay = Ms(cold_ms);
    p.trigger_delay = Ms(trigger_ms);
    p.publisher_exec = Ms(publisher_ms);
  }
}

inline void ConstantThinkTimes(LoadProfile& lp, double ms) {
  for (auto& w : lp.workflows) {
    for (auto& s : w.steps) s.think = Ms(ms);
  }
}

// A compiled plan with every artifact deployed into a fresh world.
struct Harness {
  DeploymentPlan plan;
  std::unique_ptr<SimWorld> world;

  Harness(const ApplicationSpec& app, const DeploymentConfig& cfg, std::uint64_t seed = 1)
      : plan(Compile(app, cfg)), world(std::make_unique<SimWorld>(plan, seed)) {
    for (const auto& a : plan.artifacts) world->DeployArtifact(a);
  }

  std::vector<TraceRecord> Records(const std::string& platform) const {
    std::vector<TraceRecord> out;
    for (const auto& line : world->SinkFor(platform).Lines()) {
      auto r = ParseRecordLine(line);
      EXPECT_TRUE(r.has_value()) << line;
      if (r) out.push_back(*r);
    }
    return out;
  }

  std::vector<TraceRecord> AllRecords() const {
    std::vector<TraceRecord> out;
    for (const auto& p : world->SinkOrder()) {
      auto part = Records(p);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
};

inline CallOrigin LoadgenOrigin(SimWorld& world, const std::string& workflow = "w") {
  CallOrigin o;
  o.platform = std::string(kLoadgenPlatform);
  o.function = workflow;
  o.context = NewContext(world.ids());
  o.truth_node = world.AddTruthRoot(o.context, workflow);
  return o;
}

inline std::vector<TraceRecord> OfKind(const std::vector<TraceRecord>& records, RecordKind kind) {
  std::vector<TraceRecord> out;
  for (const auto& r : records) {
    if (r.kind == kind) out.push_back(r);
  }
  return out;
}

}  // namespace fbtest
