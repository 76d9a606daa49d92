#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "faasbench/loadgen.hpp"
#include "faasbench/tracing.hpp"

namespace faasbench {

struct ParseReport {
  std::int64_t lines = 0;
  std::int64_t records = 0;
  std::int64_t parse_errors = 0;
  std::int64_t metadata_lines = 0;
  bool header_seen = false;
};

struct ParsedLog {
  std::vector<TraceRecord> records;
  ParseReport report;
  std::map<std::string, std::int64_t> dropped;  // platform -> lines lost to rate limiting
  std::vector<PhaseWindow> phases;

  std::int64_t total_dropped() const;
};

// Malformed lines are counted and skipped. Throws UnsupportedSchemaVersion
// when a header names a version other than v1.
ParsedLog ParseLogs(const std::vector<std::string>& lines);
ParsedLog ParseLogStream(std::istream& in);
ParsedLog ParseLogFile(const std::filesystem::path& path);

// Every record is one node. A call node's child is the invocation it
// caused; an invocation's children are the calls and store operations it
// issued.
struct TreeNode {
  std::size_t record = 0;  // index into the record list
  int parent = -1;
  std::vector<int> children;
};

struct CallTree {
  Id128 context;
  int root = -1;               // node of the load generator call; -1 if it was lost
  std::vector<TreeNode> nodes;
  std::vector<int> tops;       // parentless nodes: the root plus any orphans
  std::int64_t unmatched_pairs = 0;
  bool complete = false;
};

// One tree per context, sorted by context id. Children are ordered by
// start time.
std::vector<CallTree> BuildTrees(const std::vector<TraceRecord>& records);

// Canonical shape: invocation nodes labelled by function, store operations
// as "db:<op>:<service>", the root as "root:<workflow>"; call records are
// folded into the invocation they caused; children sorted.
std::string CanonicalTree(const CallTree& tree, const std::vector<TraceRecord>& records);

enum class EdgeKind { kRoot, kSync, kPublish, kTrigger };
std::string_view EdgeKindName(EdgeKind kind);

struct NodeBreakdown {
  std::string function;
  std::string platform;
  Micros exec = 0;
  Micros compute = 0;
  bool publisher = false;
  bool cold_start = false;
};

struct EdgeBreakdown {
  EdgeKind kind = EdgeKind::kSync;
  std::string caller;
  std::string callee;
  std::string caller_platform;
  std::string callee_platform;
  Micros duration = 0;
  Micros callee_exec = 0;
  Micros network = 0;          // root/sync: duration - callee exec
  Micros publish_latency = 0;  // publish: duration - publisher exec
  Micros trigger_delay = 0;    // trigger: triggered start - publisher start
  double one_way_estimate = 0;  // root/sync: (duration - callee exec) / 2
  std::string origin_platform;  // publish/trigger: platform of the publishing function
};

struct DbBreakdown {
  std::string function;
  std::string platform;
  std::string service;
  DbOpKind op = DbOpKind::kGet;
  Micros duration = 0;
};

struct LatencyBreakdown {
  Id128 context;
  std::string workflow;
  Micros root_rtt = 0;
  std::vector<NodeBreakdown> nodes;
  std::vector<EdgeBreakdown> edges;
  std::vector<DbBreakdown> db;
  // Totals along the critical path of the root call; overlapped time that
  // is not on the path is counted as network wait.
  Micros total_compute = 0;
  Micros total_network = 0;
  Micros total_db = 0;

  Micros residual() const { return root_rtt - (total_compute + total_network + total_db); }
};

// Throws IncompleteTree.
LatencyBreakdown Decompose(const CallTree& tree, const std::vector<TraceRecord>& records);

struct TriggerSample {
  Id128 context;
  std::string origin;       // platform of the publishing function
  std::string destination;  // platform of the publisher and the triggered function
  std::string caller;
  std::string target;
  Micros publish_latency = 0;
  Micros trigger_delay = 0;
};

// One sample per async edge of each complete tree.
std::vector<TriggerSample> TriggerMetrics(const std::vector<LatencyBreakdown>& breakdowns);

// Sync edges only: (round trip - callee execution) / 2 per edge.
std::vector<double> EstimateOneWayNetwork(const LatencyBreakdown& breakdown);

struct SummaryStats {
  std::int64_t count = 0;
  std::optional<double> min, p25, p50, p75, max;
  std::optional<double> whisker_low, whisker_high;  // extreme values within 1.5 IQR of the box
  std::int64_t drop_count = 0;
};

// Nearest-rank quantile on sorted values: element ceil(q * n), 1-based.
double NearestRank(const std::vector<double>& sorted, double q);
SummaryStats Summarize(std::vector<double> values, std::int64_t drop_count = 0);

struct PhaseColdCount {
  PhaseWindow window;
  std::int64_t invocations = 0;
  std::int64_t cold = 0;
};

struct TimelineBucket {
  std::size_t index = 0;
  Micros start = 0;
  std::int64_t invocations = 0;
  std::int64_t cold = 0;
  SummaryStats exec;
};

struct ColdStartReport {
  std::vector<PhaseColdCount> phases;
  std::int64_t invocations = 0;
  std::int64_t cold = 0;
  std::int64_t distinct_executors = 0;
  std::int64_t flag_mismatches = 0;  // cold flag disagrees with first appearance of the executor key
  std::optional<std::size_t> burst_phase;
  std::vector<TimelineBucket> timeline;  // first 30 one-second buckets of the burst phase
  std::optional<double> first_bucket_p50;
  std::optional<double> steady_p50;  // warm invocations of the burst phase
  std::optional<double> cold_p50;
  std::optional<double> warm_p50;
};

inline constexpr std::size_t kTimelineBuckets = 30;

// Uses every INVOCATION record, including those in incomplete trees.
// Invocations are assigned to phases by logged start time; anything after
// the last phase counts toward it.
ColdStartReport ColdStartAnalysis(const std::vector<TraceRecord>& records, const std::vector<PhaseWindow>& phases);

struct SummaryRow {
  std::string metric;
  std::string group;
  SummaryStats stats;
};

struct Analysis {
  ParseReport parse;
  std::map<std::string, std::int64_t> dropped;
  std::int64_t total_dropped = 0;
  std::vector<PhaseWindow> phases;
  std::int64_t records = 0;
  std::int64_t contexts = 0;
  std::int64_t complete_trees = 0;
  std::int64_t incomplete_trees = 0;
  std::vector<LatencyBreakdown> breakdowns;
  std::vector<TriggerSample> triggers;
  ColdStartReport coldstart;
  std::vector<SummaryRow> summary;

  const SummaryRow* Find(std::string_view metric, std::string_view group) const;
};

Analysis Analyze(const ParsedLog& log);

// Writes summary.json, summary.csv, latency_breakdown.csv, edges.csv,
// trigger_delays.csv, coldstart.csv and coldstart_timeline.csv.
void WriteReports(const Analysis& analysis, const std::filesystem::path& dir);
std::string SummaryJson(const Analysis& analysis);

}  // namespace faasbench
