#pragma once

#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "faasbench/app_model.hpp"
#include "faasbench/common.hpp"

namespace faasbench {

// Trace log format, version 1. One record per line, 13 tab-separated fields:
//
//   runId platformId recordKind functionName contextId pairId calleeName mode
//   startTsMicros endTsMicros executorKey coldStart dbOpKind
//
// Absent fields are written as "-". Lines starting with '#' are metadata:
// the version header, per-platform drop counters, and load phase windows.
inline constexpr std::string_view kTraceHeader = "#faasbench-trace\tv1";
inline constexpr std::string_view kTraceHeaderPrefix = "#faasbench-trace\t";
inline constexpr std::string_view kLoadgenPlatform = "loadgen";
inline constexpr std::size_t kTraceFieldCount = 13;

enum class RecordKind { kInvocation, kOutgoingCall, kDbCall };
enum class DbOpKind { kGet, kSet };

std::string_view RecordKindName(RecordKind kind);
std::string_view DbOpKindName(DbOpKind op);

struct TraceRecord {
  std::string run_id;
  std::string platform_id;
  RecordKind kind = RecordKind::kInvocation;
  std::string function_name;
  Id128 context_id;
  // INVOCATION: inbound pair. OUTGOING_CALL: outbound pair. DB_CALL: absent.
  std::optional<Id128> pair_id;
  std::string callee_name;  // OUTGOING_CALL: callee function; DB_CALL: service
  std::optional<CallMode> mode;
  Micros start_ts = 0;  // logged clock: true time plus the platform's clock offset
  Micros end_ts = 0;
  // INVOCATION: the executor that ran it. OUTGOING_CALL and DB_CALL: the
  // executor that issued the call (absent for load generator records).
  std::optional<Id128> executor_key;
  std::optional<bool> cold_start;  // INVOCATION only
  std::optional<DbOpKind> db_op;   // DB_CALL only

  Micros Duration() const { return end_ts - start_ts; }

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

// Throws Error(kMalformedRecord) when required fields for the record kind
// are missing or end precedes start.
void CheckWellFormed(const TraceRecord& record);

std::string SerializeRecord(const TraceRecord& record);
// Returns nullopt for lines that do not parse as a well-formed record.
std::optional<TraceRecord> ParseRecordLine(std::string_view line);

std::string FormatDropLine(std::string_view platform_id, std::int64_t dropped);
std::string FormatPhaseLine(std::size_t index, std::string_view kind, Micros start, Micros end);

// Seeded source of 128-bit identifiers.
class IdSource {
 public:
  explicit IdSource(std::uint64_t seed) : rng_(seed) {}
  Id128 Next() { return Id128{rng_.NextU64(), rng_.NextU64()}; }

 private:
  Rng rng_;
};

// A context id is drawn once per function chain, at the root call.
inline Id128 NewContext(IdSource& ids) { return ids.Next(); }
// A pair id links one outgoing call to the invocation it causes.
inline Id128 NewPair(IdSource& ids) { return ids.Next(); }

// Per-executor environment slot. The first observation finds it empty,
// fills it with a random key and reports a cold start.
struct ExecutorEnvironment {
  std::optional<Id128> key;
};

struct ExecutorObservation {
  Id128 key;
  bool cold_start = false;
};

ExecutorObservation ObserveExecutor(ExecutorEnvironment& env, IdSource& ids);

// Fixed one-second tumbling window on virtual time. nullopt = unlimited.
class RateLimiter {
 public:
  explicit RateLimiter(std::optional<std::int64_t> lines_per_second) : limit_(lines_per_second) {}

  bool Admit(Micros at);
  std::int64_t dropped() const { return dropped_; }

 private:
  std::optional<std::int64_t> limit_;
  std::int64_t window_ = -1;
  std::int64_t in_window_ = 0;
  std::int64_t dropped_ = 0;
};

enum class EmitResult { kAccepted, kDropped };

// A platform's standard log. Emission is serialized internally so
// concurrent producers keep their own order.
class LogSink {
 public:
  LogSink(std::string platform_id, std::optional<std::int64_t> lines_per_second)
      : platform_id_(std::move(platform_id)), limiter_(lines_per_second), limit_(lines_per_second) {}

  // `emit_time` is true virtual time and drives the rate limiter.
  EmitResult Emit(const TraceRecord& record, Micros emit_time);

  const std::string& platform_id() const { return platform_id_; }
  std::vector<std::string> Lines() const;
  std::vector<std::string> LinesForRun(std::string_view run_id) const;
  std::int64_t accepted() const;
  std::int64_t dropped() const;
  void Clear();

 private:
  std::string platform_id_;
  mutable std::mutex mu_;
  RateLimiter limiter_;
  std::optional<std::int64_t> limit_;
  std::vector<std::string> lines_;
  std::vector<std::string> line_runs_;
};

}  // namespace faasbench
