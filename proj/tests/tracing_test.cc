#include <set>
#include <unordered_set>

#include "support.hpp"

namespace fbtest {
namespace {

TraceRecord SampleInvocation() {
  IdSource ids(4);
  TraceRecord r;
  r.run_id = "run-1";
  r.platform_id = "cloud-a";
  r.kind = RecordKind::kInvocation;
  r.function_name = "getCart";
  r.context_id = ids.Next();
  r.pair_id = ids.Next();
  r.start_ts = 1000;
  r.end_ts = 2500;
  r.executor_key = ids.Next();
  r.cold_start = true;
  return r;
}

TEST(Ids, ContextsAreDistinctAndReplayable) {
  IdSource a(99), b(99);
  std::unordered_set<Id128, Id128Hash> seen;
  for (int i = 0; i < 100000; ++i) {
    const Id128 id = NewContext(a);
    ASSERT_TRUE(seen.insert(id).second) << "collision at " << i;
    ASSERT_EQ(NewContext(b), id);
  }
}

TEST(Ids, PairsReplayable) {
  IdSource a(5), b(5);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(NewPair(a), NewPair(b));
}

TEST(Executor, FirstObservationIsCold) {
  IdSource ids(1);
  ExecutorEnvironment e1, e2;
  const auto first = ObserveExecutor(e1, ids);
  const auto again = ObserveExecutor(e1, ids);
  const auto other = ObserveExecutor(e2, ids);
  EXPECT_TRUE(first.cold_start);
  EXPECT_FALSE(again.cold_start);
  EXPECT_EQ(first.key, again.key);
  EXPECT_TRUE(other.cold_start);
  EXPECT_NE(other.key, first.key);
}

TEST(Record, RoundTrip) {
  const TraceRecord r = SampleInvocation();
  const std::string line = SerializeRecord(r);
  EXPECT_EQ(std::count(line.begin(), line.end(), '\t'), static_cast<long>(kTraceFieldCount - 1));
  EXPECT_EQ(ParseRecordLine(line), r);

  TraceRecord call = r;
  call.kind = RecordKind::kOutgoingCall;
  call.callee_name = "listProducts";
  call.mode = CallMode::kAsync;
  call.cold_start.reset();
  EXPECT_EQ(ParseRecordLine(SerializeRecord(call)), call);

  TraceRecord db = r;
  db.kind = RecordKind::kDbCall;
  db.pair_id.reset();
  db.cold_start.reset();
  db.callee_name = "kvstore";
  db.db_op = DbOpKind::kSet;
  EXPECT_EQ(ParseRecordLine(SerializeRecord(db)), db);
}

TEST(Record, EndBeforeStartIsMalformed) {
  TraceRecord r = SampleInvocation();
  r.end_ts = r.start_ts - 1;
  try {
    CheckWellFormed(r);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedRecord);
  }
  EXPECT_THROW(SerializeRecord(r), Error);
}

TEST(Record, MissingFieldsAreMalformed) {
  TraceRecord inv = SampleInvocation();
  inv.cold_start.reset();
  EXPECT_THROW(CheckWellFormed(inv), Error);
  TraceRecord call = SampleInvocation();
  call.kind = RecordKind::kOutgoingCall;
  call.cold_start.reset();
  EXPECT_THROW(CheckWellFormed(call), Error);  // no callee, no mode
}

TEST(Record, BadLinesDoNotParse) {
  EXPECT_FALSE(ParseRecordLine("a\tb\tc\td\te").has_value());
  std::string line = SerializeRecord(SampleInvocation());
  EXPECT_FALSE(ParseRecordLine(line.substr(0, line.size() / 2)).has_value());
  std::string bad_kind = line;
  bad_kind.replace(bad_kind.find("INVOCATION"), 10, "INVOKATION");
  EXPECT_FALSE(ParseRecordLine(bad_kind).has_value());
}

TEST(RateLimiter, CapPerSecond) {
  RateLimiter lim(250);
  int admitted = 0;
  for (int i = 0; i < 300; ++i) admitted += lim.Admit(i * (kMicrosPerSecond / 300));
  EXPECT_EQ(admitted, 250);
  EXPECT_EQ(lim.dropped(), 50);
  EXPECT_TRUE(lim.Admit(kMicrosPerSecond));  // next window
}

TEST(LogSink, UnlimitedAcceptsEverything) {
  LogSink sink("p", std::nullopt);
  TraceRecord r = SampleInvocation();
  for (int i = 0; i < 10000; ++i) EXPECT_EQ(sink.Emit(r, 0), EmitResult::kAccepted);
  EXPECT_EQ(sink.accepted(), 10000);
  EXPECT_EQ(sink.dropped(), 0);
}

TEST(LogSink, LimitedCountsDrops) {
  LogSink sink("p", 250);
  TraceRecord r = SampleInvocation();
  for (int i = 0; i < 300; ++i) sink.Emit(r, 10);
  EXPECT_EQ(sink.accepted(), 250);
  EXPECT_EQ(sink.dropped(), 50);
  EXPECT_EQ(sink.Lines().size(), 250u);
}

TEST(LogSink, FiltersByRun) {
  LogSink sink("p", std::nullopt);
  TraceRecord r = SampleInvocation();
  sink.Emit(r, 0);
  r.run_id = "run-2";
  sink.Emit(r, 0);
  sink.Emit(r, 0);
  EXPECT_EQ(sink.LinesForRun("run-1").size(), 1u);
  EXPECT_EQ(sink.LinesForRun("run-2").size(), 2u);
}

}  // namespace
}  // namespace fbtest
