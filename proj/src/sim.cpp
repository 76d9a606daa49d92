#include "faasbench/sim.hpp"

#include <algorithm>
#include <cmath>

namespace faasbench {

namespace {

struct EndpointParts {
  std::string platform;
  std::string function;
};

std::optional<EndpointParts> SplitEndpoint(std::string_view endpoint) {
  const auto slash = endpoint.find('/');
  if (slash == std::string_view::npos || slash == 0 || slash + 1 == endpoint.size()) return std::nullopt;
  return EndpointParts{std::string(endpoint.substr(0, slash)), std::string(endpoint.substr(slash + 1))};
}

}  // namespace

std::string GroundTruth::Canonical(int node) const {
  const TruthNode& n = nodes.at(static_cast<std::size_t>(node));
  if (n.children.empty()) return n.label;
  std::vector<std::string> parts;
  parts.reserve(n.children.size());
  for (int c : n.children) parts.push_back(Canonical(c));
  std::sort(parts.begin(), parts.end());
  std::string out = n.label + "(";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += ",";
    out += parts[i];
  }
  return out + ")";
}

std::map<std::string, std::string> GroundTruth::CanonicalByContext() const {
  std::map<std::string, std::string> out;
  for (int r : roots) out[nodes[static_cast<std::size_t>(r)].context.ToHex()] = Canonical(r);
  return out;
}

struct SimWorld::Activation {
  PlatformState* platform = nullptr;
  const DeployedFunction* fn = nullptr;
  ExecutorPtr executor;
  InvokeRequest req;
  Id128 key;
  bool cold = false;
  Micros body_start = 0;
  int truth_node = -1;
  std::int64_t response_bytes = 0;
  std::function<void(const InvokeResult&)> done;

  CallOrigin Origin() const { return {platform->spec->id, fn->name, key, req.context, truth_node}; }
};

SimWorld::SimWorld(DeploymentPlan plan, std::uint64_t seed)
    : plan_(std::move(plan)), rng_(DeriveSeed(seed, "sim")), ids_(DeriveSeed(seed, "ids")) {
  for (const auto& spec : plan_.platforms) {
    PlatformState& state = platforms_[spec.id];
    state.spec = &spec;
    state.sink = std::make_unique<LogSink>(spec.id, spec.log_line_rate_limit);
  }
}

SimWorld::PlatformState& SimWorld::Platform(const std::string& id) {
  auto it = platforms_.find(id);
  if (it == platforms_.end()) throw Error(ErrorCode::kUnknownPlatform, id);
  return it->second;
}

void SimWorld::DeployArtifact(const DeploymentArtifact& artifact) {
  PlatformState& p = Platform(artifact.platform_id);
  p.tracing = artifact.tracing_enabled;
  for (const auto& f : artifact.functions) p.functions[f.name] = f;
}

void SimWorld::RemoveArtifact(const DeploymentArtifact& artifact) {
  PlatformState& p = Platform(artifact.platform_id);
  for (const auto& f : artifact.functions) {
    p.functions.erase(f.name);
    p.pools.erase(f.name);
  }
}

bool SimWorld::IsDeployed(std::string_view platform, std::string_view function) const {
  auto it = platforms_.find(std::string(platform));
  return it != platforms_.end() && it->second.functions.contains(std::string(function));
}

void SimWorld::Schedule(Micros at, std::function<void()> action) {
  if (at < now_) at = now_;
  queue_.push(Event{at, next_seq_++, std::move(action)});
}

void SimWorld::RunUntilIdle() {
  while (!queue_.empty()) {
    Event ev = std::move(const_cast<Event&>(queue_.top()));
    queue_.pop();
    now_ = ev.at;
    ++events_processed_;
    ev.action();
  }
}

LogSink& SimWorld::SinkFor(std::string_view platform) {
  if (platform == kLoadgenPlatform) return loadgen_sink_;
  return *Platform(std::string(platform)).sink;
}

const LogSink& SimWorld::SinkFor(std::string_view platform) const {
  if (platform == kLoadgenPlatform) return loadgen_sink_;
  auto it = platforms_.find(std::string(platform));
  if (it == platforms_.end()) throw Error(ErrorCode::kUnknownPlatform, std::string(platform));
  return *it->second.sink;
}

std::vector<std::string> SimWorld::SinkOrder() const {
  std::vector<std::string> order;
  for (const auto& p : plan_.platforms) order.push_back(p.id);
  order.emplace_back(kLoadgenPlatform);
  return order;
}

Micros SimWorld::Transfer(const PlatformSpec& sender, std::int64_t bytes) const {
  if (sender.bandwidth_bytes_per_ms <= 0 || bytes <= 0) return 0;
  return static_cast<Micros>(std::llround(static_cast<double>(bytes) * 1000.0 / sender.bandwidth_bytes_per_ms));
}

Micros SimWorld::SampleLatency(const std::string& from, const std::string& to, std::int64_t bytes) {
  if (from == kLoadgenPlatform || to == kLoadgenPlatform) {
    const std::string& side = from == kLoadgenPlatform ? to : from;
    const PlatformSpec& spec = *Platform(side).spec;
    auto it = spec.network.find(std::string(kLoadgenPlatform));
    if (it == spec.network.end()) throw Error(ErrorCode::kMissingNetworkLatency, side + "->loadgen");
    return it->second.Sample(rng_) + Transfer(spec, bytes);
  }
  const PlatformSpec& a = *Platform(from).spec;
  const PlatformSpec& b = *Platform(to).spec;
  const DurationDistribution* d = nullptr;
  if (auto it = a.network.find(to); it != a.network.end()) {
    d = &it->second;
  } else if (auto jt = b.network.find(from); jt != b.network.end()) {
    d = &jt->second;
  } else {
    throw Error(ErrorCode::kMissingNetworkLatency, from + "->" + to);
  }
  return d->Sample(rng_) + Transfer(a, bytes);
}

Micros SimWorld::Logged(const std::string& platform, Micros t) const {
  if (platform == kLoadgenPlatform) return t;
  return t + platforms_.at(platform).spec->clock_offset;
}

void SimWorld::Emit(const std::string& platform, TraceRecord record, Micros emit_time) {
  if (platform != kLoadgenPlatform && !platforms_.at(platform).tracing) return;
  record.run_id = run_id_;
  record.platform_id = platform;
  record.start_ts = Logged(platform, record.start_ts);
  record.end_ts = Logged(platform, record.end_ts);
  SinkFor(platform).Emit(record, emit_time);
}

int SimWorld::AddTruthNode(const Id128& context, int parent, std::string label) {
  const int index = static_cast<int>(truth_.nodes.size());
  truth_.nodes.push_back(TruthNode{context, parent, std::move(label), {}});
  if (parent >= 0) truth_.nodes[static_cast<std::size_t>(parent)].children.push_back(index);
  return index;
}

int SimWorld::AddTruthRoot(const Id128& context, const std::string& workflow) {
  const int index = AddTruthNode(context, -1, "root:" + workflow);
  truth_.roots.push_back(index);
  return index;
}

SimWorld::ExecutorPtr SimWorld::Acquire(PlatformState& p, const std::string& function, Micros arrival) {
  auto& pool = p.pools[function];
  const Micros keep_alive = p.spec->keep_alive;
  std::erase_if(pool, [&](const ExecutorPtr& e) { return !e->busy && e->last_idle_at + keep_alive < arrival; });
  ExecutorPtr best;
  for (const auto& e : pool) {
    if (e->busy || e->last_idle_at >= arrival) continue;
    if (!best || e->last_idle_at > best->last_idle_at) best = e;
  }
  if (!best) {
    best = std::make_shared<Executor>();
    pool.push_back(best);
  }
  best->busy = true;
  return best;
}

void SimWorld::Invoke(const std::string& endpoint, InvokeRequest req, std::function<void(const InvokeResult&)> done) {
  auto parts = SplitEndpoint(endpoint);
  if (!parts || !platforms_.contains(parts->platform)) throw Error(ErrorCode::kUnknownEndpoint, endpoint);
  if (!IsDeployed(parts->platform, parts->function)) throw Error(ErrorCode::kNotDeployed, parts->function);

  const Micros arrival = req.arrival;
  Schedule(arrival, [this, parts = *parts, req = std::move(req), done = std::move(done)]() mutable {
    PlatformState& p = Platform(parts.platform);
    auto fit = p.functions.find(parts.function);
    if (fit == p.functions.end()) throw Error(ErrorCode::kNotDeployed, parts.function);

    auto act = std::make_shared<Activation>();
    act->platform = &p;
    act->fn = &fit->second;
    act->executor = Acquire(p, parts.function, req.arrival);
    const ExecutorObservation obs = ObserveExecutor(act->executor->env, ids_);
    act->key = obs.key;
    act->cold = obs.cold_start;
    act->body_start = req.arrival;
    if (obs.cold_start) {
      truth_.executor_creations.push_back({req.arrival, parts.platform, parts.function, obs.key});
      act->body_start += p.spec->cold_start_delay.Sample(rng_);
    }
    act->truth_node = AddTruthNode(req.context, req.truth_parent, parts.function);
    act->req = std::move(req);
    act->done = std::move(done);

    if (act->fn->publisher) {
      // The event enters the pipeline when the publisher is reached; the
      // triggered function starts triggerDelay after the publisher's start.
      const Micros trigger_at = act->req.arrival + p.spec->trigger_delay.Sample(rng_);
      const Micros end = act->body_start + p.spec->publisher_exec.Sample(rng_);
      const Id128 pair = NewPair(ids_);
      const std::string target = act->req.forward_to;
      const auto target_parts = SplitEndpoint(target);
      InvokeRequest fwd;
      fwd.context = act->req.context;
      fwd.pair = pair;
      fwd.arrival = trigger_at;
      fwd.truth_parent = act->truth_node;
      fwd.payload_bytes = act->req.payload_bytes;
      Invoke(target, std::move(fwd), [](const InvokeResult&) {});
      Schedule(end, [this, act, pair, end, callee = target_parts ? target_parts->function : target] {
        TraceRecord r;
        r.kind = RecordKind::kOutgoingCall;
        r.function_name = act->fn->name;
        r.context_id = act->req.context;
        r.pair_id = pair;
        r.callee_name = callee;
        r.mode = CallMode::kAsync;
        r.start_ts = act->req.arrival;
        r.end_ts = end;
        r.executor_key = act->key;
        Emit(act->platform->spec->id, std::move(r), end);
        Finish(act, end);
      });
      return;
    }

    const ResolvedSteps* body = act->fn->FindBody(act->req.route);
    if (body == nullptr) body = &act->fn->body;
    Schedule(act->body_start, [this, act, body] {
      RunSteps(act, body, 0, act->body_start, [this, act](Micros end) { Finish(act, end); });
    });
  });
}

void SimWorld::Finish(const std::shared_ptr<Activation>& act, Micros end) {
  act->executor->busy = false;
  act->executor->last_idle_at = end;

  TraceRecord r;
  r.kind = RecordKind::kInvocation;
  r.function_name = act->fn->name;
  r.context_id = act->req.context;
  r.pair_id = act->req.pair;
  r.start_ts = act->req.arrival;
  r.end_ts = end;
  r.executor_key = act->key;
  r.cold_start = act->cold;
  Emit(act->platform->spec->id, std::move(r), end);

  InvokeResult result;
  result.arrival = act->req.arrival;
  result.body_start = act->body_start;
  result.end = end;
  result.response_bytes = act->response_bytes;
  result.cold_start = act->cold;
  result.executor_key = act->key;
  auto done = std::move(act->done);
  act->executor.reset();
  if (done) done(result);
}

void SimWorld::RunSteps(const std::shared_ptr<Activation>& act, const ResolvedSteps* steps, std::size_t index,
                        Micros t, Continuation k) {
  if (index >= steps->size()) {
    k(t);
    return;
  }
  const ResolvedStep& step = (*steps)[index];
  auto next = [this, act, steps, index, k](Micros t2) { RunSteps(act, steps, index + 1, t2, k); };

  switch (step.kind) {
    case StepKind::kCompute: {
      const Micros done_at = t + step.compute_time.Sample(rng_);
      Schedule(done_at, [next, done_at] { next(done_at); });
      return;
    }
    case StepKind::kCall:
      RemoteCall(act->Origin(), step.endpoint, CallMode::kSync, t, step.payload_bytes, step.route,
                 [next](Micros at, std::int64_t) { next(at); });
      return;
    case StepKind::kPublish:
      RemoteCall(act->Origin(), step.target_endpoint, CallMode::kAsync, t, step.payload_bytes, {},
                 [next](Micros at, std::int64_t) { next(at); });
      return;
    case StepKind::kDbGet:
    case StepKind::kDbSet:
      DbOp(act->Origin(), step.kind == StepKind::kDbGet ? DbOpKind::kGet : DbOpKind::kSet, step.service, step.key,
           step.value_bytes, t, [next](Micros at, std::int64_t) { next(at); });
      return;
    case StepKind::kParallel: {
      struct Join {
        std::size_t remaining;
        Micros latest;
      };
      auto join = std::make_shared<Join>(Join{step.branches.size(), t});
      if (step.branches.empty()) {
        next(t);
        return;
      }
      for (const auto& branch : step.branches) {
        RunSteps(act, &branch, 0, t, [join, next](Micros tb) {
          join->latest = std::max(join->latest, tb);
          if (--join->remaining == 0) next(join->latest);
        });
      }
      return;
    }
    case StepKind::kReturn:
      act->response_bytes = step.payload_bytes;
      k(t);
      return;
  }
}

void SimWorld::RemoteCall(const CallOrigin& origin, const std::string& target_endpoint, CallMode mode, Micros at,
                          std::int64_t payload_bytes, const std::string& route,
                          std::function<void(Micros, std::int64_t)> done) {
  auto parts = SplitEndpoint(target_endpoint);
  if (!parts || !platforms_.contains(parts->platform)) throw Error(ErrorCode::kUnknownEndpoint, target_endpoint);
  const std::int64_t request_bytes = payload_bytes + plan_.tracing_overhead_bytes;
  const Id128 pair = NewPair(ids_);

  auto emit_call = [this, origin, pair, callee = parts->function, mode, at](Micros end) {
    TraceRecord r;
    r.kind = RecordKind::kOutgoingCall;
    r.function_name = origin.function;
    r.context_id = origin.context;
    r.pair_id = pair;
    r.callee_name = callee;
    r.mode = mode;
    r.start_ts = at;
    r.end_ts = end;
    r.executor_key = origin.executor_key;
    Emit(origin.platform, std::move(r), end);
  };

  const Micros arrival = at + SampleLatency(origin.platform, parts->platform, request_bytes);
  if (mode == CallMode::kAsync) {
    Publish(parts->platform, target_endpoint, origin.context, pair, arrival, origin.truth_node,
            [emit_call, done](Micros accept) {
              emit_call(accept);
              done(accept, 0);
            });
    return;
  }

  InvokeRequest req;
  req.context = origin.context;
  req.pair = pair;
  req.route = route;
  req.payload_bytes = payload_bytes;
  req.arrival = arrival;
  req.truth_parent = origin.truth_node;
  Invoke(target_endpoint, std::move(req),
         [this, origin, callee_platform = parts->platform, emit_call, done](const InvokeResult& result) {
           const Micros back = SampleLatency(callee_platform, origin.platform, result.response_bytes);
           const Micros done_at = result.end + back;
           Schedule(done_at, [emit_call, done, done_at, bytes = result.response_bytes] {
             emit_call(done_at);
             done(done_at, bytes);
           });
         });
}

void SimWorld::Publish(const std::string& platform, const std::string& target_endpoint, const Id128& context,
                       const Id128& pair, Micros arrival, int truth_parent, std::function<void(Micros)> done) {
  auto parts = SplitEndpoint(target_endpoint);
  if (!parts || parts->platform != platform) throw Error(ErrorCode::kUnknownEndpoint, target_endpoint);
  auto pub = plan_.publisher_table.find(platform);
  const PlatformState& p = Platform(platform);
  auto fit = p.functions.find(parts->function);
  if (fit == p.functions.end()) throw Error(ErrorCode::kNotDeployed, parts->function);
  if (fit->second.trigger != TriggerKind::kEventAsync || pub == plan_.publisher_table.end()) {
    throw Error(ErrorCode::kNotAsync, parts->function);
  }
  InvokeRequest req;
  req.context = context;
  req.pair = pair;
  req.arrival = arrival;
  req.truth_parent = truth_parent;
  req.forward_to = target_endpoint;
  Invoke(pub->second, std::move(req), [done = std::move(done)](const InvokeResult& r) { done(r.end); });
}

void SimWorld::DbOp(const CallOrigin& origin, DbOpKind op, const std::string& service, const std::string& key,
                    std::int64_t value_bytes, Micros at, std::function<void(Micros, std::int64_t)> done) {
  if (!plan_.service_bindings.contains(service)) throw Error(ErrorCode::kNoServiceBinding, service);
  const PlatformSpec& spec = *Platform(origin.platform).spec;
  auto it = spec.network.find(service);
  if (it == spec.network.end()) throw Error(ErrorCode::kMissingNetworkLatency, origin.platform + "->" + service);
  const Micros reply_at = at + it->second.Sample(rng_) + Transfer(spec, op == DbOpKind::kSet ? value_bytes : 0);
  AddTruthNode(origin.context, origin.truth_node, "db:" + std::string(DbOpKindName(op)) + ":" + service);

  Schedule(reply_at, [this, origin, op, service, key, value_bytes, at, reply_at, done = std::move(done)] {
    const std::string slot = service + "/" + key;
    std::int64_t size = 0;
    if (op == DbOpKind::kSet) {
      store_[slot] = value_bytes;
      size = value_bytes;
    } else if (auto found = store_.find(slot); found != store_.end()) {
      size = found->second;
    }
    TraceRecord r;
    r.kind = RecordKind::kDbCall;
    r.function_name = origin.function;
    r.context_id = origin.context;
    r.callee_name = service;
    r.start_ts = at;
    r.end_ts = reply_at;
    r.executor_key = origin.executor_key;
    r.db_op = op;
    Emit(origin.platform, std::move(r), reply_at);
    done(reply_at, size);
  });
}

void SimPlatformAdapter::Deploy(const DeploymentArtifact& artifact) {
  if (fail_reason_) {
    std::string reason = std::move(*fail_reason_);
    fail_reason_.reset();
    throw Error(ErrorCode::kAdapterFailure, platform_id_, reason);
  }
  if (artifact.platform_id != platform_id_) throw Error(ErrorCode::kUnknownPlatform, artifact.platform_id);
  world_.DeployArtifact(artifact);
}

std::vector<std::string> SimPlatformAdapter::CollectLogs(std::string_view run_id) {
  return world_.SinkFor(platform_id_).LinesForRun(run_id);
}

void SimPlatformAdapter::Remove(const DeploymentArtifact& artifact) {
  ++remove_calls_;
  world_.RemoveArtifact(artifact);
}

}  // namespace faasbench
