#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "faasbench/deployment.hpp"
#include "faasbench/tracing.hpp"

namespace faasbench {

// Who issues a call or store operation. Load generator calls use
// platform == kLoadgenPlatform and carry the workflow name as `function`.
struct CallOrigin {
  std::string platform;
  std::string function;
  std::optional<Id128> executor_key;
  Id128 context;
  int truth_node = -1;  // ground-truth parent, -1 for none
};

struct InvokeRequest {
  Id128 context;
  Id128 pair;
  std::string route;
  std::int64_t payload_bytes = 0;
  Micros arrival = 0;     // true virtual time
  int truth_parent = -1;
  std::string forward_to;  // publisher invocations: endpoint of the triggered function
};

struct InvokeResult {
  Micros arrival = 0;
  Micros body_start = 0;
  Micros end = 0;
  std::int64_t response_bytes = 0;
  bool cold_start = false;
  Id128 executor_key;
};

// One node of the simulator's own record of what actually happened,
// independent of the logs.
struct TruthNode {
  Id128 context;
  int parent = -1;
  std::string label;  // "root:<workflow>", "<function>", "db:<op>:<service>"
  std::vector<int> children;
};

struct ExecutorCreation {
  Micros at = 0;  // true arrival time of the cold invocation
  std::string platform;
  std::string function;
  Id128 key;
};

struct GroundTruth {
  std::vector<TruthNode> nodes;
  std::vector<int> roots;
  std::vector<ExecutorCreation> executor_creations;

  // Canonical form: label(child,child,...) with children sorted.
  std::string Canonical(int node) const;
  // contextId hex -> canonical tree of the root in that context.
  std::map<std::string, std::string> CanonicalByContext() const;
};

// Deterministic discrete-event simulation of every platform in a plan.
// Strictly single-threaded; one instance per run.
class SimWorld {
 public:
  SimWorld(DeploymentPlan plan, std::uint64_t seed);
  SimWorld(const SimWorld&) = delete;
  SimWorld& operator=(const SimWorld&) = delete;

  const DeploymentPlan& plan() const { return plan_; }
  void set_run_id(std::string run_id) { run_id_ = std::move(run_id); }
  const std::string& run_id() const { return run_id_; }

  // Adapter hooks.
  void DeployArtifact(const DeploymentArtifact& artifact);
  void RemoveArtifact(const DeploymentArtifact& artifact);
  bool IsDeployed(std::string_view platform, std::string_view function) const;

  Micros now() const { return now_; }
  void Schedule(Micros at, std::function<void()> action);
  // Processes events in (fireAt, insertion) order until none remain.
  void RunUntilIdle();

  // Starts an invocation of `endpoint` at req.arrival. `done` fires at the
  // invocation's end. Throws UnknownEndpoint or NotDeployed.
  void Invoke(const std::string& endpoint, InvokeRequest req, std::function<void(const InvokeResult&)> done);

  // sync: `done(response_time, response_bytes)` after out leg, callee and
  // back leg. async: `target_endpoint` is the event-triggered function; the
  // event goes to the publisher on its platform and `done(accept_time, 0)`
  // fires when the publisher has accepted it.
  void RemoteCall(const CallOrigin& origin, const std::string& target_endpoint, CallMode mode, Micros at,
                  std::int64_t payload_bytes, const std::string& route,
                  std::function<void(Micros, std::int64_t)> done);

  // Delivers an event for `target_endpoint` to the publisher of `platform`
  // at `arrival`. `done(accept_time)` fires at the publisher's end.
  void Publish(const std::string& platform, const std::string& target_endpoint, const Id128& context,
               const Id128& pair, Micros arrival, int truth_parent, std::function<void(Micros)> done);

  // `done(reply_time, value_bytes)`. Throws NoServiceBinding.
  void DbOp(const CallOrigin& origin, DbOpKind op, const std::string& service, const std::string& key,
            std::int64_t value_bytes, Micros at, std::function<void(Micros, std::int64_t)> done);

  IdSource& ids() { return ids_; }
  Rng& rng() { return rng_; }

  // Root node for a load generator workflow step.
  int AddTruthRoot(const Id128& context, const std::string& workflow);

  LogSink& SinkFor(std::string_view platform);
  const LogSink& SinkFor(std::string_view platform) const;
  // Platform ids in plan order followed by the load generator.
  std::vector<std::string> SinkOrder() const;

  const GroundTruth& truth() const { return truth_; }
  std::int64_t events_processed() const { return events_processed_; }

  // Sampled one-way latency; throws MissingNetworkLatency.
  Micros SampleLatency(const std::string& from, const std::string& to, std::int64_t bytes);

 private:
  struct Executor {
    ExecutorEnvironment env;
    bool busy = false;
    Micros last_idle_at = 0;
  };
  using ExecutorPtr = std::shared_ptr<Executor>;

  struct PlatformState {
    const PlatformSpec* spec = nullptr;
    std::map<std::string, DeployedFunction> functions;
    std::map<std::string, std::vector<ExecutorPtr>> pools;
    std::unique_ptr<LogSink> sink;
    bool tracing = true;
  };

  struct Activation;
  using Continuation = std::function<void(Micros)>;

  struct Event {
    Micros at;
    std::uint64_t seq;
    std::function<void()> action;
  };
  struct EventOrder {
    bool operator()(const Event& a, const Event& b) const {
      return a.at != b.at ? a.at > b.at : a.seq > b.seq;
    }
  };

  PlatformState& Platform(const std::string& id);
  ExecutorPtr Acquire(PlatformState& p, const std::string& function, Micros arrival);
  void RunSteps(const std::shared_ptr<Activation>& act, const ResolvedSteps* steps, std::size_t index, Micros t,
                Continuation k);
  void Finish(const std::shared_ptr<Activation>& act, Micros end);
  void Emit(const std::string& platform, TraceRecord record, Micros emit_time);
  Micros Logged(const std::string& platform, Micros t) const;
  int AddTruthNode(const Id128& context, int parent, std::string label);
  Micros Transfer(const PlatformSpec& sender, std::int64_t bytes) const;

  DeploymentPlan plan_;
  std::string run_id_ = "run";
  Rng rng_;
  IdSource ids_;
  Micros now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::int64_t events_processed_ = 0;
  std::priority_queue<Event, std::vector<Event>, EventOrder> queue_;
  std::map<std::string, PlatformState> platforms_;
  LogSink loadgen_sink_{std::string(kLoadgenPlatform), std::nullopt};
  std::map<std::string, std::int64_t> store_;
  GroundTruth truth_;
};

// PlatformAdapter backed by one platform of a SimWorld.
class SimPlatformAdapter : public PlatformAdapter {
 public:
  SimPlatformAdapter(SimWorld& world, std::string platform_id) : world_(world), platform_id_(std::move(platform_id)) {}

  void Deploy(const DeploymentArtifact& artifact) override;
  std::vector<std::string> CollectLogs(std::string_view run_id) override;
  void Remove(const DeploymentArtifact& artifact) override;

  // Test hook: makes the next Deploy throw.
  void FailNextDeploy(std::string reason) { fail_reason_ = std::move(reason); }
  int remove_calls() const { return remove_calls_; }

 private:
  SimWorld& world_;
  std::string platform_id_;
  std::optional<std::string> fail_reason_;
  int remove_calls_ = 0;
};

}  // namespace faasbench
