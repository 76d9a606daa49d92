#include <fstream>
#include <set>
#include <sstream>

#include "support.hpp"

namespace fbtest {
namespace {

// Builds records by hand for a context with ids drawn from a fixed source.
struct Builder {
  IdSource ids{77};
  Id128 ctx = ids.Next();
  std::vector<TraceRecord> records;

  TraceRecord& Add(RecordKind kind, std::string platform, std::string fn, Micros start, Micros end) {
    TraceRecord r;
    r.run_id = "run";
    r.platform_id = std::move(platform);
    r.kind = kind;
    r.function_name = std::move(fn);
    r.context_id = ctx;
    r.start_ts = start;
    r.end_ts = end;
    records.push_back(r);
    return records.back();
  }
  Id128 Call(std::string platform, std::string caller, std::optional<Id128> executor, std::string callee,
             CallMode mode, Micros start, Micros end) {
    const Id128 pair = ids.Next();
    TraceRecord& r = Add(RecordKind::kOutgoingCall, std::move(platform), std::move(caller), start, end);
    r.pair_id = pair;
    r.callee_name = std::move(callee);
    r.mode = mode;
    r.executor_key = executor;
    return pair;
  }
  void Invocation(std::string platform, std::string fn, Id128 pair, Id128 executor, Micros start, Micros end,
                  bool cold = false) {
    TraceRecord& r = Add(RecordKind::kInvocation, std::move(platform), std::move(fn), start, end);
    r.pair_id = pair;
    r.executor_key = executor;
    r.cold_start = cold;
  }
  void Db(std::string platform, std::string fn, Id128 executor, Micros start, Micros end) {
    TraceRecord& r = Add(RecordKind::kDbCall, std::move(platform), std::move(fn), start, end);
    r.callee_name = "store";
    r.executor_key = executor;
    r.db_op = DbOpKind::kGet;
  }
};

// Loadgen -> A (exec 10 ms) -> sync call 6 ms -> B (exec 2 ms).
Builder ChainAB() {
  Builder b;
  const Id128 ka = b.ids.Next(), kb = b.ids.Next();
  const Id128 p0 = b.Call("loadgen", "w", std::nullopt, "A", CallMode::kSync, 0, 12000);
  b.Invocation("x", "A", p0, ka, 1000, 11000);
  const Id128 p1 = b.Call("x", "A", ka, "B", CallMode::kSync, 3000, 9000);
  b.Invocation("y", "B", p1, kb, 5000, 7000);
  return b;
}

TEST(Parse, EmptyInput) {
  const ParsedLog log = ParseLogs({});
  EXPECT_TRUE(log.records.empty());
  EXPECT_EQ(log.report.parse_errors, 0);
}

TEST(Parse, OneValidLineRoundTrips) {
  Builder b = ChainAB();
  const ParsedLog log = ParseLogs({SerializeRecord(b.records[1])});
  ASSERT_EQ(log.records.size(), 1u);
  EXPECT_EQ(log.records[0], b.records[1]);
}

TEST(Parse, ShortLineIsAnError) {
  const ParsedLog log = ParseLogs({"a\tb\tc\td\te", ""});
  EXPECT_EQ(log.records.size(), 0u);
  EXPECT_EQ(log.report.parse_errors, 1);
}

TEST(Parse, MetadataAndVersion) {
  const ParsedLog log = ParseLogs({std::string(kTraceHeader), FormatDropLine("cloud-b", 42),
                                   FormatPhaseLine(0, "burst", 0, 1000), FormatPhaseLine(1, "pause", 1000, 5000)});
  EXPECT_TRUE(log.report.header_seen);
  EXPECT_EQ(log.dropped.at("cloud-b"), 42);
  EXPECT_EQ(log.total_dropped(), 42);
  ASSERT_EQ(log.phases.size(), 2u);
  EXPECT_EQ(log.phases[1].kind, PhaseKind::kPause);
  EXPECT_EQ(log.phases[1].end, 5000);
  try {
    ParseLogs({"#faasbench-trace\tv2"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupportedSchemaVersion);
  }
}

TEST(Parse, StreamMatchesLines) {
  Builder b = ChainAB();
  std::vector<std::string> lines{std::string(kTraceHeader)};
  for (const auto& r : b.records) lines.push_back(SerializeRecord(r));
  std::istringstream in(JoinLines(lines));
  EXPECT_EQ(ParseLogStream(in).records, ParseLogs(lines).records);
}

TEST(Trees, SingleRootAndLeaf) {
  Builder b;
  const Id128 k = b.ids.Next();
  const Id128 p = b.Call("loadgen", "w", std::nullopt, "f", CallMode::kSync, 0, 10);
  b.Invocation("x", "f", p, k, 2, 8);
  const auto trees = BuildTrees(b.records);
  ASSERT_EQ(trees.size(), 1u);
  EXPECT_TRUE(trees[0].complete);
  EXPECT_EQ(trees[0].nodes.size(), 2u);
  EXPECT_EQ(CanonicalTree(trees[0], b.records), "root:w(f)");
  const LatencyBreakdown bd = Decompose(trees[0], b.records);
  ASSERT_EQ(bd.nodes.size(), 1u);
  EXPECT_EQ(bd.nodes[0].compute, 6);
  EXPECT_EQ(bd.total_db, 0);
}

TEST(Trees, DroppedCalleeMakesTreeIncomplete) {
  Builder b = ChainAB();
  b.records.pop_back();
  const auto trees = BuildTrees(b.records);
  ASSERT_EQ(trees.size(), 1u);
  EXPECT_FALSE(trees[0].complete);
  EXPECT_EQ(trees[0].unmatched_pairs, 1);
  EXPECT_THROW(Decompose(trees[0], b.records), Error);
}

TEST(Trees, PartitionCoversEveryRecord) {
  const Recipe r = LoadRecipe("exp3-three-way-factory");
  LoadProfile lp = r.profile;
  lp.scale_factor = 0.2;
  const auto sim = Simulate(LoadBuiltin("smartfactory"), r.config, lp, 5);
  const ParsedLog log = ParseLogs(sim.raw_lines);
  const auto trees = BuildTrees(log.records);
  std::size_t nodes = 0;
  std::set<std::size_t> seen;
  for (const auto& t : trees) {
    nodes += t.nodes.size();
    for (const auto& n : t.nodes) EXPECT_TRUE(seen.insert(n.record).second);
  }
  EXPECT_EQ(nodes, log.records.size());
}

TEST(Decompose, ForcedArithmetic) {
  Builder b = ChainAB();
  const auto trees = BuildTrees(b.records);
  const LatencyBreakdown bd = Decompose(trees.at(0), b.records);
  std::map<std::string, Micros> compute;
  for (const auto& n : bd.nodes) compute[n.function] = n.compute;
  EXPECT_EQ(compute.at("A"), 4000);
  EXPECT_EQ(compute.at("B"), 2000);
  const EdgeBreakdown* sync = nullptr;
  for (const auto& e : bd.edges) {
    if (e.kind == EdgeKind::kSync) sync = &e;
  }
  ASSERT_NE(sync, nullptr);
  EXPECT_EQ(sync->network, 4000);
  EXPECT_DOUBLE_EQ(sync->one_way_estimate, 2000.0);
  EXPECT_EQ(bd.root_rtt, 12000);
  EXPECT_EQ(bd.residual(), 0);
}

TEST(Decompose, ParallelBlockCountsWaitAsNetwork) {
  Builder b;
  const Id128 ka = b.ids.Next(), kb = b.ids.Next(), kc = b.ids.Next();
  const Id128 p0 = b.Call("loadgen", "w", std::nullopt, "A", CallMode::kSync, 0, 30000);
  b.Invocation("x", "A", p0, ka, 0, 30000);
  const Id128 p1 = b.Call("x", "A", ka, "B", CallMode::kSync, 1000, 21000);
  const Id128 p2 = b.Call("x", "A", ka, "C", CallMode::kSync, 1000, 11000);
  b.Invocation("x", "B", p1, kb, 5000, 17000);
  b.Invocation("x", "C", p2, kc, 3000, 9000);
  b.Db("x", "A", ka, 22000, 25000);
  const auto trees = BuildTrees(b.records);
  const LatencyBreakdown bd = Decompose(trees.at(0), b.records);
  // Critical path: A compute 1 + B leg (8 net + 12 compute) + 1 + db 3 + 5.
  EXPECT_EQ(bd.total_compute, 1000 + 12000 + 1000 + 5000);
  EXPECT_EQ(bd.total_network, 8000);
  EXPECT_EQ(bd.total_db, 3000);
  EXPECT_EQ(bd.residual(), 0);
  for (const auto& n : bd.nodes) EXPECT_GE(n.compute, 0);
}

TEST(Decompose, PublishAndTriggerEdges) {
  Builder b;
  const Id128 ka = b.ids.Next(), kp = b.ids.Next(), ke = b.ids.Next();
  const Id128 p0 = b.Call("loadgen", "w", std::nullopt, "A", CallMode::kSync, 0, 50000);
  b.Invocation("a", "A", p0, ka, 1000, 49000);
  const Id128 p1 = b.Call("a", "A", ka, "E", CallMode::kAsync, 2000, 31000);  // publish 25 ms + publisher 4 ms
  b.Invocation("b", "publisher.b", p1, kp, 27000, 31000);
  const Id128 p2 = b.Call("b", "publisher.b", kp, "E", CallMode::kAsync, 27000, 31000);
  b.Invocation("b", "E", p2, ke, 127000, 130000);
  const auto trees = BuildTrees(b.records);
  ASSERT_TRUE(trees.at(0).complete);
  const LatencyBreakdown bd = Decompose(trees.at(0), b.records);
  const auto triggers = TriggerMetrics({bd});
  ASSERT_EQ(triggers.size(), 1u);
  EXPECT_EQ(triggers[0].publish_latency, 25000);
  EXPECT_EQ(triggers[0].trigger_delay, 100000);
  EXPECT_EQ(triggers[0].origin, "a");
  EXPECT_EQ(triggers[0].destination, "b");
}

TEST(Decompose, WebshopHasNoTriggers) {
  const Recipe r = LoadRecipe("exp1-single-cloud");
  LoadProfile lp = r.profile;
  lp.scale_factor = 0.005;
  const Analysis a = Analyze(ParseLogs(Simulate(LoadBuiltin("webshop"), r.config, lp, 1).raw_lines));
  EXPECT_TRUE(a.triggers.empty());
  EXPECT_GT(a.complete_trees, 0);
}

// Caller on a, callee on b; a->b legs 10 ms, b->a legs 20 ms.
TEST(OneWay, AsymmetricLegsAverage) {
  ApplicationSpec app;
  app.name = "skew";
  app.functions = {Fn("f", {BodyStep::Call("g"), BodyStep::Return()}, true), Fn("g", {Work(2), BodyStep::Return()})};
  DeploymentConfig cfg;
  cfg.benchmark = "skew";
  PlatformSpec a = ConstPlatform("a", 0, 0), b = ConstPlatform("b", 0, 0);
  a.network["b"] = Ms(10);
  b.network["a"] = Ms(20);
  cfg.platforms = {a, b};
  cfg.assignment = {{"f", "a"}, {"g", "b"}};
  LoadProfile lp;
  lp.name = "once";
  lp.workflows = {{"w", {WorkflowStep{"f", {}, 0, Ms(0)}}}};
  Phase p;
  p.kind = PhaseKind::kPeriodic;
  p.duration = kMicrosPerSecond;
  p.entries = {{"w", kMicrosPerSecond, std::nullopt}};
  lp.phases = {p};
  for (Micros offset : {Micros{0}, Micros{50000}}) {
    cfg.platforms[0].clock_offset = offset;
    const ParsedLog log = ParseLogs(Simulate(app, cfg, lp, 1).raw_lines);
    const auto trees = BuildTrees(log.records);
    const auto est = EstimateOneWayNetwork(Decompose(trees.at(0), log.records));
    ASSERT_EQ(est.size(), 1u);
    EXPECT_DOUBLE_EQ(est[0], 15000.0);
    EXPECT_DOUBLE_EQ(std::abs(est[0] - 10000.0), 5000.0);
  }
}

TEST(Summary, NearestRank) {
  const SummaryStats s = Summarize({5000, 1000, 3000, 2000, 4000});
  EXPECT_EQ(s.count, 5);
  EXPECT_EQ(s.p50, 3000.0);
  EXPECT_EQ(s.p25, 2000.0);
  EXPECT_EQ(s.p75, 4000.0);
  EXPECT_EQ(s.min, 1000.0);
  EXPECT_EQ(s.max, 5000.0);
}

TEST(Summary, Empty) {
  const SummaryStats s = Summarize({});
  EXPECT_EQ(s.count, 0);
  EXPECT_FALSE(s.p50.has_value());
  EXPECT_FALSE(s.min.has_value());
  EXPECT_FALSE(s.whisker_low.has_value());
}

// Whiskers by brute force: extreme values inside [q1 - 1.5 iqr, q3 + 1.5 iqr].
TEST(Summary, WhiskersExcludeOutliers) {
  std::vector<double> v;
  for (int i = 1; i <= 20; ++i) v.push_back(i);
  v.push_back(100);
  v.push_back(-50);
  const SummaryStats s = Summarize(v);
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  const double q1 = sorted[static_cast<std::size_t>(std::ceil(0.25 * sorted.size())) - 1];
  const double q3 = sorted[static_cast<std::size_t>(std::ceil(0.75 * sorted.size())) - 1];
  const double lo = q1 - 1.5 * (q3 - q1), hi = q3 + 1.5 * (q3 - q1);
  double wl = 1e18, wh = -1e18;
  for (double x : v) {
    if (x >= lo && x <= hi) {
      wl = std::min(wl, x);
      wh = std::max(wh, x);
    }
  }
  EXPECT_EQ(s.whisker_low, wl);
  EXPECT_EQ(s.whisker_high, wh);
  EXPECT_EQ(s.whisker_high, 20.0);
}

TEST(Summary, LogNormalExecMedian) {
  ApplicationSpec app;
  app.name = "ln";
  app.functions = {Fn("f", {BodyStep::Compute(DurationDistribution::LogNormalMs(50, 0.3))}, true)};
  DeploymentConfig cfg;
  cfg.benchmark = "ln";
  cfg.platforms = {ConstPlatform("p", 0, 1)};
  cfg.assignment = {{"f", "p"}};
  LoadProfile lp;
  lp.name = "ln";
  lp.workflows = {{"w", {WorkflowStep{"f", {}, 0, Ms(0)}}}};
  Phase p;
  p.kind = PhaseKind::kPeriodic;
  p.duration = 1200 * kMicrosPerSecond;
  p.entries = {{"w", kMicrosPerSecond, std::nullopt}};
  lp.phases = {p};
  const Analysis a = Analyze(ParseLogs(Simulate(app, cfg, lp, 2).raw_lines));
  const SummaryRow* row = a.Find("exec", "f");
  ASSERT_NE(row, nullptr);
  ASSERT_GE(row->stats.count, 1000);
  EXPECT_NEAR(*row->stats.p50, 50000.0, 5000.0);
}

TEST(ColdStart, ColdMinusWarmEqualsDelay) {
  ApplicationSpec app;
  app.name = "cs";
  app.functions = {Fn("f", {Work(3)}, true)};
  DeploymentConfig cfg;
  cfg.benchmark = "cs";
  cfg.platforms = {ConstPlatform("p", 0, 1, 400)};
  cfg.platforms[0].keep_alive = 5 * kMicrosPerSecond;
  cfg.assignment = {{"f", "p"}};
  LoadProfile lp;
  lp.name = "cs";
  lp.workflows = {{"w", {WorkflowStep{"f", {}, 0, Ms(0)}}}};
  Phase p;
  p.kind = PhaseKind::kPeriodic;
  p.duration = 60 * kMicrosPerSecond;
  p.entries = {{"w", 7 * kMicrosPerSecond, std::nullopt}, {"w", 2 * kMicrosPerSecond, std::nullopt}};
  lp.phases = {p};
  const auto sim = Simulate(app, cfg, lp, 4);
  const Analysis a = Analyze(ParseLogs(sim.raw_lines));
  ASSERT_TRUE(a.coldstart.cold_p50 && a.coldstart.warm_p50);
  EXPECT_NEAR(*a.coldstart.cold_p50 - *a.coldstart.warm_p50, 400000.0, 1.0);
  EXPECT_EQ(a.coldstart.cold, static_cast<std::int64_t>(sim.truth.executor_creations.size()));
  EXPECT_EQ(a.coldstart.flag_mismatches, 0);
}

TEST(ColdStart, SequentialClientStaysWarm) {
  ApplicationSpec app;
  app.name = "warm";
  app.functions = {Fn("f", {Work(3)}, true)};
  DeploymentConfig cfg;
  cfg.benchmark = "warm";
  cfg.platforms = {ConstPlatform("p", 0, 1, 400)};
  cfg.assignment = {{"f", "p"}};
  LoadProfile lp;
  lp.name = "warm";
  lp.workflows = {{"w", {WorkflowStep{"f", {}, 0, Ms(0)}}}};
  Phase burst;
  burst.kind = PhaseKind::kBurst;
  burst.name = "burst";
  burst.duration = 30 * kMicrosPerSecond;
  burst.total_flows = 30;
  burst.mix = {{"w", 1.0}};
  lp.phases = {burst};
  const Analysis a = Analyze(ParseLogs(Simulate(app, cfg, lp, 4).raw_lines));
  EXPECT_EQ(a.coldstart.cold, 1);  // the pool of one executor
  EXPECT_EQ(a.coldstart.invocations, 30);
}

TEST(Reports, FilesAndOfflineAnalysisMatch) {
  const Recipe r = LoadRecipe("exp3-three-way-factory");
  LoadProfile lp = r.profile;
  lp.scale_factor = 0.2;
  const auto sim = Simulate(LoadBuiltin("smartfactory"), r.config, lp, 8);
  const Analysis a = Analyze(ParseLogs(sim.raw_lines));
  const auto dir = std::filesystem::temp_directory_path() / "faasbench-reports-test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "raw.log") << JoinLines(sim.raw_lines);
  }
  WriteReports(a, dir / "inline");
  const AnalyzeOutcome offline = AnalyzeLogFile(dir / "raw.log", dir / "offline", 0);
  ASSERT_EQ(offline.exit_code, 0) << offline.error;
  for (const char* f : {"summary.json", "summary.csv", "latency_breakdown.csv", "edges.csv", "trigger_delays.csv",
                        "coldstart.csv", "coldstart_timeline.csv"}) {
    std::ifstream x(dir / "inline" / f), y(dir / "offline" / f);
    std::stringstream sx, sy;
    sx << x.rdbuf();
    sy << y.rdbuf();
    EXPECT_FALSE(sx.str().empty()) << f;
    EXPECT_EQ(sx.str(), sy.str()) << f;
  }
  std::ifstream trig(dir / "inline" / "trigger_delays.csv");
  std::string header;
  std::getline(trig, header);
  EXPECT_EQ(header, "context,origin,destination,caller,target,publish_latency_us,trigger_delay_us");
  std::filesystem::remove_all(dir);
}

TEST(Reports, TruncatedAndEmptyLogs) {
  const auto dir = std::filesystem::temp_directory_path() / "faasbench-trunc-test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const Recipe r = LoadRecipe("exp1-single-cloud");
  LoadProfile lp = r.profile;
  lp.scale_factor = 0.005;
  std::string text = JoinLines(Simulate(LoadBuiltin("webshop"), r.config, lp, 1).raw_lines);
  text.resize(text.size() / 2);
  {
    std::ofstream(dir / "trunc.log") << text;
    std::ofstream(dir / "empty.log") << kTraceHeader << "\n";
  }
  const AnalyzeOutcome t = AnalyzeLogFile(dir / "trunc.log", dir / "t", 1);
  ASSERT_TRUE(t.analysis.has_value());
  EXPECT_LE(t.analysis->parse.parse_errors, 1);
  EXPECT_GT(t.analysis->records, 0);
  const AnalyzeOutcome e = AnalyzeLogFile(dir / "empty.log", dir / "e", 0);
  EXPECT_EQ(e.exit_code, 0);
  EXPECT_EQ(e.analysis->records, 0);
  EXPECT_EQ(AnalyzeLogFile(dir / "missing.log", dir / "m", 0).exit_code, kExitConfigError);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace fbtest
