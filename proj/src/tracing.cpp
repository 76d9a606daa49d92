#include "faasbench/tracing.hpp"

#include <charconv>

namespace faasbench {

std::string_view RecordKindName(RecordKind kind) {
  switch (kind) {
    case RecordKind::kInvocation: return "INVOCATION";
    case RecordKind::kOutgoingCall: return "OUTGOING_CALL";
    case RecordKind::kDbCall: return "DB_CALL";
  }
  return "?";
}

std::string_view DbOpKindName(DbOpKind op) { return op == DbOpKind::kGet ? "get" : "set"; }

void CheckWellFormed(const TraceRecord& r) {
  auto fail = [&](const std::string& why) { throw Error(ErrorCode::kMalformedRecord, r.function_name, why); };
  if (r.end_ts < r.start_ts) fail("endTs < startTs");
  if (r.run_id.empty() || r.platform_id.empty() || r.function_name.empty()) fail("missing identity field");
  switch (r.kind) {
    case RecordKind::kInvocation:
      if (!r.pair_id || !r.executor_key || !r.cold_start) fail("INVOCATION needs pairId, executorKey, coldStart");
      if (r.mode || r.db_op) fail("INVOCATION carries call fields");
      break;
    case RecordKind::kOutgoingCall:
      if (!r.pair_id || r.callee_name.empty() || !r.mode) fail("OUTGOING_CALL needs pairId, callee, mode");
      if (r.cold_start || r.db_op) fail("OUTGOING_CALL carries foreign fields");
      break;
    case RecordKind::kDbCall:
      if (!r.db_op || r.callee_name.empty()) fail("DB_CALL needs dbOpKind and service");
      if (r.pair_id || r.mode || r.cold_start) fail("DB_CALL carries foreign fields");
      break;
  }
}

namespace {

void AppendField(std::string& out, std::string_view field) {
  out.push_back('\t');
  out.append(field.empty() ? std::string_view("-") : field);
}

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::optional<Micros> ParseInt(std::string_view s) {
  Micros v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::string SerializeRecord(const TraceRecord& r) {
  CheckWellFormed(r);
  std::string out;
  out.reserve(200);
  out.append(r.run_id);
  AppendField(out, r.platform_id);
  AppendField(out, RecordKindName(r.kind));
  AppendField(out, r.function_name);
  AppendField(out, r.context_id.ToHex());
  AppendField(out, r.pair_id ? r.pair_id->ToHex() : "");
  AppendField(out, r.callee_name);
  AppendField(out, r.mode ? CallModeName(*r.mode) : "");
  AppendField(out, std::to_string(r.start_ts));
  AppendField(out, std::to_string(r.end_ts));
  AppendField(out, r.executor_key ? r.executor_key->ToHex() : "");
  AppendField(out, r.cold_start ? (*r.cold_start ? "1" : "0") : "");
  AppendField(out, r.db_op ? DbOpKindName(*r.db_op) : "");
  return out;
}

std::optional<TraceRecord> ParseRecordLine(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto f = SplitTabs(line);
  if (f.size() != kTraceFieldCount) return std::nullopt;
  for (const auto& field : f) {
    if (field.empty()) return std::nullopt;
  }
  auto opt = [](std::string_view s) { return s == "-" ? std::string_view() : s; };

  TraceRecord r;
  r.run_id = std::string(f[0]);
  r.platform_id = std::string(f[1]);
  if (f[2] == "INVOCATION") {
    r.kind = RecordKind::kInvocation;
  } else if (f[2] == "OUTGOING_CALL") {
    r.kind = RecordKind::kOutgoingCall;
  } else if (f[2] == "DB_CALL") {
    r.kind = RecordKind::kDbCall;
  } else {
    return std::nullopt;
  }
  r.function_name = std::string(f[3]);
  auto ctx = Id128::FromHex(f[4]);
  if (!ctx) return std::nullopt;
  r.context_id = *ctx;
  if (!opt(f[5]).empty()) {
    r.pair_id = Id128::FromHex(f[5]);
    if (!r.pair_id) return std::nullopt;
  }
  r.callee_name = std::string(opt(f[6]));
  if (f[7] == "sync") {
    r.mode = CallMode::kSync;
  } else if (f[7] == "async") {
    r.mode = CallMode::kAsync;
  } else if (f[7] != "-") {
    return std::nullopt;
  }
  auto start = ParseInt(f[8]);
  auto end = ParseInt(f[9]);
  if (!start || !end) return std::nullopt;
  r.start_ts = *start;
  r.end_ts = *end;
  if (!opt(f[10]).empty()) {
    r.executor_key = Id128::FromHex(f[10]);
    if (!r.executor_key) return std::nullopt;
  }
  if (f[11] == "1") {
    r.cold_start = true;
  } else if (f[11] == "0") {
    r.cold_start = false;
  } else if (f[11] != "-") {
    return std::nullopt;
  }
  if (f[12] == "get") {
    r.db_op = DbOpKind::kGet;
  } else if (f[12] == "set") {
    r.db_op = DbOpKind::kSet;
  } else if (f[12] != "-") {
    return std::nullopt;
  }
  try {
    CheckWellFormed(r);
  } catch (const Error&) {
    return std::nullopt;
  }
  return r;
}

std::string FormatDropLine(std::string_view platform_id, std::int64_t dropped) {
  return "#dropped\t" + std::string(platform_id) + "\t" + std::to_string(dropped);
}

std::string FormatPhaseLine(std::size_t index, std::string_view kind, Micros start, Micros end) {
  return "#phase\t" + std::to_string(index) + "\t" + std::string(kind) + "\t" + std::to_string(start) + "\t" +
         std::to_string(end);
}

ExecutorObservation ObserveExecutor(ExecutorEnvironment& env, IdSource& ids) {
  if (env.key) return {*env.key, false};
  env.key = ids.Next();
  return {*env.key, true};
}

bool RateLimiter::Admit(Micros at) {
  if (!limit_) return true;
  const std::int64_t window = at >= 0 ? at / kMicrosPerSecond : (at - kMicrosPerSecond + 1) / kMicrosPerSecond;
  if (window != window_) {
    window_ = window;
    in_window_ = 0;
  }
  if (in_window_ >= *limit_) {
    ++dropped_;
    return false;
  }
  ++in_window_;
  return true;
}

EmitResult LogSink::Emit(const TraceRecord& record, Micros emit_time) {
  std::string line = SerializeRecord(record);
  std::lock_guard lock(mu_);
  if (!limiter_.Admit(emit_time)) return EmitResult::kDropped;
  lines_.push_back(std::move(line));
  line_runs_.push_back(record.run_id);
  return EmitResult::kAccepted;
}

std::vector<std::string> LogSink::Lines() const {
  std::lock_guard lock(mu_);
  return lines_;
}

std::vector<std::string> LogSink::LinesForRun(std::string_view run_id) const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < lines_.size(); ++i) {
    if (line_runs_[i] == run_id) out.push_back(lines_[i]);
  }
  return out;
}

std::int64_t LogSink::accepted() const {
  std::lock_guard lock(mu_);
  return static_cast<std::int64_t>(lines_.size());
}

std::int64_t LogSink::dropped() const {
  std::lock_guard lock(mu_);
  return limiter_.dropped();
}

void LogSink::Clear() {
  std::lock_guard lock(mu_);
  lines_.clear();
  line_runs_.clear();
  limiter_ = RateLimiter(limit_);
}

}  // namespace faasbench
