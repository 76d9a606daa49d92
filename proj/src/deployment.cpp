#include "faasbench/deployment.hpp"

#include <cstdio>
#include <set>

namespace faasbench {

const PlatformSpec* DeploymentConfig::FindPlatform(std::string_view id) const {
  for (const auto& p : platforms) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

PlatformSpec* DeploymentConfig::FindPlatform(std::string_view id) {
  for (auto& p : platforms) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

const ResolvedSteps* DeployedFunction::FindBody(std::string_view route) const {
  if (route.empty()) return &body;
  auto it = routes.find(std::string(route));
  return it == routes.end() ? nullptr : &it->second;
}

const EndpointBinding* DeploymentPlan::Resolve(std::string_view function_name) const {
  auto it = endpoint_table.find(std::string(function_name));
  return it == endpoint_table.end() ? nullptr : &it->second;
}

const PlatformSpec* DeploymentPlan::FindPlatform(std::string_view id) const {
  for (const auto& p : platforms) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

std::string EndpointFor(std::string_view platform_id, std::string_view function_name) {
  return std::string(platform_id) + "/" + std::string(function_name);
}

std::string PublisherNameFor(std::string_view platform_id) {
  return std::string(kPublisherPrefix) + std::string(platform_id);
}

namespace {

bool HasLatency(const PlatformSpec& from, const PlatformSpec& to) {
  return from.network.contains(to.id) || to.network.contains(from.id);
}

class Compiler {
 public:
  Compiler(const ApplicationSpec& app, const DeploymentConfig& cfg) : app_(app), cfg_(cfg) {}

  DeploymentPlan Run() {
    const ValidationReport report = Validate(app_);
    if (!report.ok()) throw Error(ErrorCode::kInvalidApplication, app_.name, report.ToString());
    CheckConfig();

    plan_.application = app_.name;
    plan_.platforms = cfg_.platforms;
    plan_.service_bindings = cfg_.service_bindings;
    plan_.tracing_overhead_bytes = cfg_.tracing_enabled ? cfg_.tracing_overhead_bytes : 0;

    for (const auto& f : app_.functions) {
      const std::string& platform = cfg_.assignment.at(f.name);
      plan_.endpoint_table[f.name] = {platform, EndpointFor(platform, f.name)};
      if (f.trigger == TriggerKind::kEventAsync) {
        plan_.publisher_table[platform] = EndpointFor(platform, PublisherNameFor(platform));
      }
    }

    // Artifacts follow the platform order of the configuration.
    for (const auto& p : cfg_.platforms) {
      DeploymentArtifact artifact;
      artifact.platform_id = p.id;
      artifact.tracing_enabled = cfg_.tracing_enabled;
      for (const auto& f : app_.functions) {
        if (cfg_.assignment.at(f.name) != p.id) continue;
        artifact.functions.push_back(ResolveFunction(f, p));
      }
      if (artifact.functions.empty()) continue;
      if (plan_.publisher_table.contains(p.id)) {
        DeployedFunction publisher;
        publisher.name = PublisherNameFor(p.id);
        publisher.endpoint = plan_.publisher_table.at(p.id);
        publisher.trigger = TriggerKind::kHttpSync;
        publisher.publisher = true;
        artifact.functions.push_back(std::move(publisher));
      }
      plan_.artifacts.push_back(std::move(artifact));
    }
    return std::move(plan_);
  }

 private:
  void CheckConfig() {
    std::set<std::string> ids;
    for (const auto& p : cfg_.platforms) {
      if (p.id.empty() || p.id == "loadgen") throw Error(ErrorCode::kInvalidConfig, p.id, "reserved platform id");
      if (!ids.insert(p.id).second) throw Error(ErrorCode::kInvalidConfig, p.id, "duplicate platform id");
      if (p.keep_alive <= 0) throw Error(ErrorCode::kInvalidConfig, p.id, "keepAlive must be positive");
    }
    for (const auto& f : app_.functions) {
      auto it = cfg_.assignment.find(f.name);
      if (it == cfg_.assignment.end()) throw Error(ErrorCode::kUnassignedFunction, f.name);
      if (cfg_.FindPlatform(it->second) == nullptr) throw Error(ErrorCode::kUnknownPlatform, it->second);
    }
    for (const auto& [fn, platform] : cfg_.assignment) {
      if (app_.Find(fn) == nullptr) throw Error(ErrorCode::kInvalidConfig, fn, "assignment names unknown function");
    }
    for (const auto& service : app_.external_services) {
      auto it = cfg_.service_bindings.find(service);
      if (it == cfg_.service_bindings.end()) throw Error(ErrorCode::kMissingServiceBinding, service);
      if (cfg_.FindPlatform(it->second.platform) == nullptr) {
        throw Error(ErrorCode::kUnknownPlatform, it->second.platform);
      }
    }
  }

  const PlatformSpec& PlatformOf(const std::string& function) const {
    return *cfg_.FindPlatform(cfg_.assignment.at(function));
  }

  ResolvedSteps ResolveSteps(const StepList& steps, const PlatformSpec& host) {
    ResolvedSteps out;
    for (const auto& s : steps) {
      ResolvedStep r;
      r.kind = s.kind;
      r.compute_time = (s.kind == StepKind::kCompute && cfg_.compute_override) ? *cfg_.compute_override : s.compute_time;
      r.target = s.target;
      r.route = s.route;
      r.payload_bytes = s.payload_bytes;
      r.service = s.service;
      r.key = s.key;
      r.value_bytes = s.value_bytes;
      switch (s.kind) {
        case StepKind::kCall: {
          const PlatformSpec& callee = PlatformOf(s.target);
          RequireLatency(host, callee);
          r.endpoint = plan_.endpoint_table.at(s.target).endpoint;
          break;
        }
        case StepKind::kPublish: {
          const PlatformSpec& callee = PlatformOf(s.target);
          RequireLatency(host, callee);
          r.endpoint = plan_.publisher_table.at(callee.id);
          r.target_endpoint = plan_.endpoint_table.at(s.target).endpoint;
          break;
        }
        case StepKind::kDbGet:
        case StepKind::kDbSet:
          if (!host.network.contains(s.service)) {
            throw Error(ErrorCode::kMissingNetworkLatency, host.id + "->" + s.service);
          }
          break;
        case StepKind::kParallel:
          for (const auto& branch : s.branches) r.branches.push_back(ResolveSteps(branch, host));
          break;
        case StepKind::kCompute:
        case StepKind::kReturn:
          break;
      }
      out.push_back(std::move(r));
    }
    return out;
  }

  void RequireLatency(const PlatformSpec& from, const PlatformSpec& to) const {
    if (!HasLatency(from, to)) throw Error(ErrorCode::kMissingNetworkLatency, from.id + "->" + to.id);
  }

  DeployedFunction ResolveFunction(const FunctionSpec& f, const PlatformSpec& host) {
    if (f.entry_point && !host.network.contains(std::string(kLoadgenName))) {
      throw Error(ErrorCode::kMissingNetworkLatency, host.id + "->loadgen");
    }
    DeployedFunction d;
    d.name = f.name;
    d.endpoint = plan_.endpoint_table.at(f.name).endpoint;
    d.trigger = f.trigger;
    d.entry_point = f.entry_point;
    d.body = ResolveSteps(f.body, host);
    for (const auto& [route, steps] : f.routes) d.routes[route] = ResolveSteps(steps, host);
    return d;
  }

  static constexpr std::string_view kLoadgenName = "loadgen";

  const ApplicationSpec& app_;
  const DeploymentConfig& cfg_;
  DeploymentPlan plan_;
};

}  // namespace

DeploymentPlan Compile(const ApplicationSpec& app, const DeploymentConfig& cfg) { return Compiler(app, cfg).Run(); }

std::string RunIdSource::Next() {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "run-%016llx", static_cast<unsigned long long>(rng_.NextU64()));
  return buf;
}

RunHandle DeployAll(const DeploymentPlan& plan, const AdapterMap& adapters, RunIdSource& run_ids) {
  return DeployAll(plan, adapters, run_ids.Next());
}

RunHandle DeployAll(const DeploymentPlan& plan, const AdapterMap& adapters, std::string run_id) {
  RunHandle handle;
  handle.run_id = std::move(run_id);
  for (const auto& artifact : plan.artifacts) {
    auto it = adapters.find(artifact.platform_id);
    std::string cause;
    if (it == adapters.end() || it->second == nullptr) {
      cause = "no adapter";
    } else {
      try {
        it->second->Deploy(artifact);
        handle.deployed.push_back(artifact);
        continue;
      } catch (const std::exception& e) {
        cause = e.what();
      }
    }
    // Roll back in reverse deployment order.
    for (auto done = handle.deployed.rbegin(); done != handle.deployed.rend(); ++done) {
      try {
        adapters.at(done->platform_id)->Remove(*done);
      } catch (const std::exception&) {
        // Removal failures during rollback cannot be reported separately.
      }
    }
    throw Error(ErrorCode::kAdapterFailure, artifact.platform_id, cause);
  }
  return handle;
}

bool TeardownReport::ok() const {
  for (const auto& o : outcomes) {
    if (!o.removed) return false;
  }
  return true;
}

TeardownReport Teardown(RunHandle& handle, const AdapterMap& adapters) {
  TeardownReport report;
  if (handle.torn_down) {
    report.noop = true;
    return report;
  }
  for (auto it = handle.deployed.rbegin(); it != handle.deployed.rend(); ++it) {
    TeardownOutcome outcome;
    outcome.platform = it->platform_id;
    auto adapter = adapters.find(it->platform_id);
    if (adapter == adapters.end() || adapter->second == nullptr) {
      outcome.error = "no adapter";
    } else {
      try {
        adapter->second->Remove(*it);
        outcome.removed = true;
      } catch (const std::exception& e) {
        outcome.error = e.what();
      }
    }
    report.outcomes.push_back(std::move(outcome));
  }
  handle.torn_down = true;
  return report;
}

}  // namespace faasbench
