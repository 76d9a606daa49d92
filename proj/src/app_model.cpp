#include "faasbench/app_model.hpp"

#include <deque>
#include <set>
#include <sstream>
#include <unordered_map>

namespace faasbench {

std::string_view TriggerKindName(TriggerKind kind) {
  return kind == TriggerKind::kHttpSync ? "http" : "event";
}

std::string_view StepKindName(StepKind kind) {
  switch (kind) {
    case StepKind::kCompute: return "compute";
    case StepKind::kCall: return "call";
    case StepKind::kPublish: return "publish";
    case StepKind::kDbGet: return "dbGet";
    case StepKind::kDbSet: return "dbSet";
    case StepKind::kParallel: return "parallel";
    case StepKind::kReturn: return "return";
  }
  return "?";
}

std::string_view CallModeName(CallMode mode) { return mode == CallMode::kSync ? "sync" : "async"; }

BodyStep BodyStep::Compute(DurationDistribution time) {
  BodyStep s;
  s.kind = StepKind::kCompute;
  s.compute_time = std::move(time);
  return s;
}

BodyStep BodyStep::Call(std::string target, std::int64_t payload_bytes, std::string route) {
  BodyStep s;
  s.kind = StepKind::kCall;
  s.target = std::move(target);
  s.payload_bytes = payload_bytes;
  s.route = std::move(route);
  return s;
}

BodyStep BodyStep::Publish(std::string target, std::int64_t payload_bytes) {
  BodyStep s;
  s.kind = StepKind::kPublish;
  s.target = std::move(target);
  s.payload_bytes = payload_bytes;
  return s;
}

BodyStep BodyStep::DbGet(std::string service, std::string key) {
  BodyStep s;
  s.kind = StepKind::kDbGet;
  s.service = std::move(service);
  s.key = std::move(key);
  return s;
}

BodyStep BodyStep::DbSet(std::string service, std::string key, std::int64_t value_bytes) {
  BodyStep s;
  s.kind = StepKind::kDbSet;
  s.service = std::move(service);
  s.key = std::move(key);
  s.value_bytes = value_bytes;
  return s;
}

BodyStep BodyStep::Parallel(std::vector<std::vector<BodyStep>> branches) {
  BodyStep s;
  s.kind = StepKind::kParallel;
  s.branches = std::move(branches);
  return s;
}

BodyStep BodyStep::Return(std::int64_t response_bytes) {
  BodyStep s;
  s.kind = StepKind::kReturn;
  s.payload_bytes = response_bytes;
  return s;
}

const StepList* FunctionSpec::FindBody(std::string_view route) const {
  if (route.empty()) return &body;
  auto it = routes.find(std::string(route));
  return it == routes.end() ? nullptr : &it->second;
}

const FunctionSpec* ApplicationSpec::Find(std::string_view function_name) const {
  for (const auto& f : functions) {
    if (f.name == function_name) return &f;
  }
  return nullptr;
}

std::string_view ViolationKindName(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kDuplicateName: return "DuplicateName";
    case ViolationKind::kUnknownTarget: return "UnknownTarget";
    case ViolationKind::kTargetKindMismatch: return "TargetKindMismatch";
    case ViolationKind::kUnknownRoute: return "UnknownRoute";
    case ViolationKind::kUnknownService: return "UnknownService";
    case ViolationKind::kNoEntryPoint: return "NoEntryPoint";
    case ViolationKind::kUnreachable: return "Unreachable";
    case ViolationKind::kParallelTooFewBranches: return "ParallelTooFewBranches";
    case ViolationKind::kReturnNotLast: return "ReturnNotLast";
    case ViolationKind::kReservedName: return "ReservedName";
    case ViolationKind::kEmptyName: return "EmptyName";
  }
  return "?";
}

std::string ValidationReport::ToString() const {
  if (ok()) return "ok";
  std::ostringstream out;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    const auto& v = violations[i];
    if (i > 0) out << "; ";
    out << ViolationKindName(v.kind) << "(" << v.detail << ") in '" << v.function << "'";
  }
  return out.str();
}

namespace {

template <typename Fn>
void ForEachStep(const StepList& steps, Fn&& fn) {
  for (const auto& step : steps) {
    fn(step);
    for (const auto& branch : step.branches) ForEachStep(branch, fn);
  }
}

template <typename Fn>
void ForEachStepOfFunction(const FunctionSpec& f, Fn&& fn) {
  ForEachStep(f.body, fn);
  for (const auto& [route, steps] : f.routes) ForEachStep(steps, fn);
}

void CheckStepList(const ApplicationSpec& app, const FunctionSpec& owner, const StepList& steps,
                   std::vector<Violation>& out) {
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const BodyStep& step = steps[i];
    switch (step.kind) {
      case StepKind::kCall:
      case StepKind::kPublish: {
        const FunctionSpec* target = app.Find(step.target);
        if (target == nullptr) {
          out.push_back({ViolationKind::kUnknownTarget, owner.name, step.target});
          break;
        }
        const TriggerKind wanted = step.kind == StepKind::kCall ? TriggerKind::kHttpSync : TriggerKind::kEventAsync;
        if (target->trigger != wanted) {
          out.push_back({ViolationKind::kTargetKindMismatch, owner.name, step.target});
        }
        if (step.kind == StepKind::kCall && target->FindBody(step.route) == nullptr) {
          out.push_back({ViolationKind::kUnknownRoute, owner.name, step.target + "/" + step.route});
        }
        break;
      }
      case StepKind::kDbGet:
      case StepKind::kDbSet: {
        bool known = false;
        for (const auto& s : app.external_services) known = known || s == step.service;
        if (!known) out.push_back({ViolationKind::kUnknownService, owner.name, step.service});
        break;
      }
      case StepKind::kParallel:
        if (step.branches.size() < 2) {
          out.push_back({ViolationKind::kParallelTooFewBranches, owner.name, std::to_string(step.branches.size())});
        }
        for (const auto& branch : step.branches) CheckStepList(app, owner, branch, out);
        break;
      case StepKind::kReturn:
        if (i + 1 != steps.size()) out.push_back({ViolationKind::kReturnNotLast, owner.name, "return"});
        break;
      case StepKind::kCompute:
        break;
    }
  }
}

}  // namespace

ValidationReport Validate(const ApplicationSpec& app) {
  ValidationReport report;
  auto& out = report.violations;

  std::set<std::string> seen;
  bool any_entry = false;
  for (const auto& f : app.functions) {
    if (f.name.empty()) out.push_back({ViolationKind::kEmptyName, f.name, "name"});
    if (f.name.starts_with(kPublisherPrefix)) out.push_back({ViolationKind::kReservedName, f.name, f.name});
    if (!seen.insert(f.name).second) out.push_back({ViolationKind::kDuplicateName, f.name, f.name});
    any_entry = any_entry || f.entry_point;
  }
  for (const auto& f : app.functions) {
    CheckStepList(app, f, f.body, out);
    for (const auto& [route, steps] : f.routes) CheckStepList(app, f, steps, out);
  }
  if (!any_entry) out.push_back({ViolationKind::kNoEntryPoint, "", app.name});

  // Reachability from entry points over call/publish edges.
  std::set<std::string> reached;
  std::deque<const FunctionSpec*> queue;
  for (const auto& f : app.functions) {
    if (f.entry_point && reached.insert(f.name).second) queue.push_back(&f);
  }
  while (!queue.empty()) {
    const FunctionSpec* f = queue.front();
    queue.pop_front();
    ForEachStepOfFunction(*f, [&](const BodyStep& step) {
      if (step.kind != StepKind::kCall && step.kind != StepKind::kPublish) return;
      const FunctionSpec* target = app.Find(step.target);
      if (target != nullptr && reached.insert(target->name).second) queue.push_back(target);
    });
  }
  if (any_entry) {
    for (const auto& f : app.functions) {
      if (!reached.contains(f.name)) out.push_back({ViolationKind::kUnreachable, f.name, f.name});
    }
  }
  return report;
}

CallGraph BuildCallGraph(const ApplicationSpec& app) {
  const ValidationReport report = Validate(app);
  if (!report.ok()) throw Error(ErrorCode::kInvalidApplication, app.name, report.ToString());

  CallGraph graph;
  for (const auto& f : app.functions) graph.nodes.push_back(f.name);
  for (const auto& f : app.functions) {
    ForEachStepOfFunction(f, [&](const BodyStep& step) {
      if (step.kind == StepKind::kCall) graph.edges.push_back({f.name, step.target, CallMode::kSync});
      if (step.kind == StepKind::kPublish) graph.edges.push_back({f.name, step.target, CallMode::kAsync});
    });
  }
  return graph;
}

}  // namespace faasbench
