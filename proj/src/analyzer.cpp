#include "faasbench/analyzer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>

namespace faasbench {

std::int64_t ParsedLog::total_dropped() const {
  std::int64_t total = 0;
  for (const auto& [platform, n] : dropped) total += n;
  return total;
}

namespace {

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

template <typename T>
std::optional<T> ParseNumber(std::string_view s) {
  T v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<PhaseKind> PhaseKindFromName(std::string_view name) {
  for (PhaseKind k : {PhaseKind::kConstantRate, PhaseKind::kPeriodic, PhaseKind::kPause, PhaseKind::kBurst}) {
    if (PhaseKindName(k) == name) return k;
  }
  return std::nullopt;
}

// Returns false for malformed metadata.
bool ParseMetadata(std::string_view line, ParsedLog& log) {
  if (line.starts_with(kTraceHeaderPrefix)) {
    const std::string_view version = line.substr(kTraceHeaderPrefix.size());
    if (version != "v1") throw Error(ErrorCode::kUnsupportedSchemaVersion, std::string(version));
    log.report.header_seen = true;
    return true;
  }
  const auto f = SplitTabs(line);
  if (f[0] == "#dropped") {
    if (f.size() != 3) return false;
    auto n = ParseNumber<std::int64_t>(f[2]);
    if (!n || *n < 0) return false;
    log.dropped[std::string(f[1])] += *n;
    return true;
  }
  if (f[0] == "#phase") {
    if (f.size() != 5) return false;
    auto index = ParseNumber<std::size_t>(f[1]);
    auto kind = PhaseKindFromName(f[2]);
    auto start = ParseNumber<Micros>(f[3]);
    auto end = ParseNumber<Micros>(f[4]);
    if (!index || !kind || !start || !end || *end < *start) return false;
    log.phases.push_back({*index, *kind, std::string(PhaseKindName(*kind)), *start, *end});
    return true;
  }
  return true;  // other comments are ignored
}

void ParseLine(std::string_view line, ParsedLog& log) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  ++log.report.lines;
  if (line.empty()) return;
  if (line.front() == '#') {
    ++log.report.metadata_lines;
    if (!ParseMetadata(line, log)) ++log.report.parse_errors;
    return;
  }
  if (auto r = ParseRecordLine(line)) {
    log.records.push_back(std::move(*r));
    ++log.report.records;
  } else {
    ++log.report.parse_errors;
  }
}

void SortPhases(ParsedLog& log) {
  std::sort(log.phases.begin(), log.phases.end(),
            [](const PhaseWindow& a, const PhaseWindow& b) { return a.index < b.index; });
}

bool IsPublisher(const TraceRecord& r) { return r.function_name.starts_with(kPublisherPrefix); }

}  // namespace

ParsedLog ParseLogs(const std::vector<std::string>& lines) {
  ParsedLog log;
  for (const auto& line : lines) ParseLine(line, log);
  SortPhases(log);
  return log;
}

ParsedLog ParseLogStream(std::istream& in) {
  ParsedLog log;
  std::string line;
  while (std::getline(in, line)) ParseLine(line, log);
  SortPhases(log);
  return log;
}

ParsedLog ParseLogFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, path.string(), "cannot open log file");
  return ParseLogStream(in);
}

std::vector<CallTree> BuildTrees(const std::vector<TraceRecord>& records) {
  std::map<Id128, std::vector<std::size_t>> by_context;
  for (std::size_t i = 0; i < records.size(); ++i) by_context[records[i].context_id].push_back(i);

  std::vector<CallTree> trees;
  trees.reserve(by_context.size());
  for (const auto& [context, members] : by_context) {
    CallTree tree;
    tree.context = context;
    tree.nodes.resize(members.size());
    std::map<Id128, int> invocation_by_pair;
    std::map<Id128, int> call_by_pair;
    std::map<std::pair<std::string, Id128>, std::vector<int>> invocations_by_executor;
    for (std::size_t n = 0; n < members.size(); ++n) {
      tree.nodes[n].record = members[n];
      const TraceRecord& r = records[members[n]];
      if (r.kind == RecordKind::kInvocation) {
        invocation_by_pair.emplace(*r.pair_id, static_cast<int>(n));
        invocations_by_executor[{r.platform_id, *r.executor_key}].push_back(static_cast<int>(n));
      } else if (r.kind == RecordKind::kOutgoingCall) {
        call_by_pair.emplace(*r.pair_id, static_cast<int>(n));
      }
    }

    auto link = [&](int child, int parent) {
      tree.nodes[static_cast<std::size_t>(child)].parent = parent;
      tree.nodes[static_cast<std::size_t>(parent)].children.push_back(child);
    };

    for (std::size_t n = 0; n < members.size(); ++n) {
      const int node = static_cast<int>(n);
      const TraceRecord& r = records[members[n]];
      switch (r.kind) {
        case RecordKind::kInvocation: {
          auto it = call_by_pair.find(*r.pair_id);
          if (it == call_by_pair.end()) {
            ++tree.unmatched_pairs;
          } else {
            link(node, it->second);
          }
          break;
        }
        case RecordKind::kOutgoingCall:
          if (!invocation_by_pair.contains(*r.pair_id)) ++tree.unmatched_pairs;
          if (r.platform_id == kLoadgenPlatform) {
            if (tree.root < 0) tree.root = node;
            break;
          }
          [[fallthrough]];
        case RecordKind::kDbCall: {
          if (!r.executor_key) break;
          auto it = invocations_by_executor.find({r.platform_id, *r.executor_key});
          if (it == invocations_by_executor.end()) break;
          int best = -1;
          for (int cand : it->second) {
            const TraceRecord& inv = records[members[static_cast<std::size_t>(cand)]];
            if (inv.start_ts > r.start_ts || inv.end_ts < r.end_ts) continue;
            if (best < 0 || inv.start_ts > records[members[static_cast<std::size_t>(best)]].start_ts) best = cand;
          }
          if (best >= 0) link(node, best);
          break;
        }
      }
    }

    for (auto& n : tree.nodes) {
      std::sort(n.children.begin(), n.children.end(), [&](int a, int b) {
        const TraceRecord& ra = records[tree.nodes[static_cast<std::size_t>(a)].record];
        const TraceRecord& rb = records[tree.nodes[static_cast<std::size_t>(b)].record];
        if (ra.start_ts != rb.start_ts) return ra.start_ts < rb.start_ts;
        if (ra.end_ts != rb.end_ts) return ra.end_ts < rb.end_ts;
        return a < b;
      });
    }
    for (std::size_t n = 0; n < tree.nodes.size(); ++n) {
      if (tree.nodes[n].parent < 0) tree.tops.push_back(static_cast<int>(n));
    }
    tree.complete = tree.root >= 0 && tree.tops.size() == 1 && tree.unmatched_pairs == 0;
    trees.push_back(std::move(tree));
  }
  return trees;
}

std::string CanonicalTree(const CallTree& tree, const std::vector<TraceRecord>& records) {
  std::function<std::string(int)> render = [&](int node) -> std::string {
    const TreeNode& n = tree.nodes[static_cast<std::size_t>(node)];
    const TraceRecord& r = records[n.record];
    if (r.kind == RecordKind::kDbCall) return "db:" + std::string(DbOpKindName(*r.db_op)) + ":" + r.callee_name;
    if (r.kind == RecordKind::kOutgoingCall) {
      // A call folds into the invocation it caused.
      std::string inner = n.children.empty() ? "?" + r.callee_name : render(n.children.front());
      if (node != tree.root) return inner;
      return "root:" + r.function_name + "(" + inner + ")";
    }
    if (n.children.empty()) return r.function_name;
    std::vector<std::string> parts;
    for (int c : n.children) parts.push_back(render(c));
    std::sort(parts.begin(), parts.end());
    std::string out = r.function_name + "(";
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i > 0) out += ",";
      out += parts[i];
    }
    return out + ")";
  };
  if (tree.root >= 0 && tree.tops.size() == 1) return render(tree.root);
  std::vector<std::string> parts;
  for (int t : tree.tops) parts.push_back(render(t));
  std::sort(parts.begin(), parts.end());
  std::string out = "incomplete(";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += ",";
    out += parts[i];
  }
  return out + ")";
}

std::string_view EdgeKindName(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::kRoot: return "root";
    case EdgeKind::kSync: return "sync";
    case EdgeKind::kPublish: return "publish";
    case EdgeKind::kTrigger: return "trigger";
  }
  return "?";
}

namespace {

class Decomposer {
 public:
  Decomposer(const CallTree& tree, const std::vector<TraceRecord>& records) : tree_(tree), records_(records) {}

  LatencyBreakdown Run() {
    LatencyBreakdown bd;
    bd.context = tree_.context;
    const TraceRecord& root = Rec(tree_.root);
    bd.workflow = root.function_name;
    bd.root_rtt = root.Duration();
    const int entry = Node(tree_.root).children.front();
    const TraceRecord& entry_rec = Rec(entry);

    EdgeBreakdown edge;
    edge.kind = EdgeKind::kRoot;
    edge.caller = root.function_name;
    edge.callee = entry_rec.function_name;
    edge.caller_platform = root.platform_id;
    edge.callee_platform = entry_rec.platform_id;
    edge.duration = root.Duration();
    edge.callee_exec = entry_rec.Duration();
    edge.network = edge.duration - edge.callee_exec;
    edge.one_way_estimate = static_cast<double>(edge.network) / 2.0;
    bd.edges.push_back(edge);

    Describe(entry, {}, bd);
    bd.total_network += edge.network;
    CriticalPath(entry, bd);
    return bd;
  }

 private:
  const TreeNode& Node(int n) const { return tree_.nodes[static_cast<std::size_t>(n)]; }
  const TraceRecord& Rec(int n) const { return records_[Node(n).record]; }

  bool Blocking(int invocation, int child) const {
    const TraceRecord& c = Rec(child);
    if (c.kind == RecordKind::kDbCall) return true;
    return c.kind == RecordKind::kOutgoingCall && !IsPublisher(Rec(invocation));
  }

  std::vector<int> BlockingChildren(int invocation) const {
    std::vector<int> out;
    for (int c : Node(invocation).children) {
      if (Blocking(invocation, c)) out.push_back(c);
    }
    return out;
  }

  // Lengths of the merged groups of blocking child intervals.
  struct Group {
    Micros start;
    Micros end;
  };
  std::vector<Group> Groups(const std::vector<int>& children) const {
    std::vector<Group> spans;
    for (int c : children) spans.push_back({Rec(c).start_ts, Rec(c).end_ts});
    std::sort(spans.begin(), spans.end(), [](const Group& a, const Group& b) { return a.start < b.start; });
    std::vector<Group> merged;
    for (const auto& s : spans) {
      if (!merged.empty() && s.start <= merged.back().end) {
        merged.back().end = std::max(merged.back().end, s.end);
      } else {
        merged.push_back(s);
      }
    }
    return merged;
  }

  Micros Compute(int invocation) const {
    Micros covered = 0;
    for (const auto& g : Groups(BlockingChildren(invocation))) covered += g.end - g.start;
    return Rec(invocation).Duration() - covered;
  }

  // Per-node, per-edge and per-store-call lists over the whole tree,
  // including subtrees reached through triggers.
  void Describe(int invocation, const std::string& origin_platform, LatencyBreakdown& bd) const {
    const TraceRecord& inv = Rec(invocation);
    NodeBreakdown nb;
    nb.function = inv.function_name;
    nb.platform = inv.platform_id;
    nb.exec = inv.Duration();
    nb.compute = Compute(invocation);
    nb.publisher = IsPublisher(inv);
    nb.cold_start = inv.cold_start.value_or(false);
    bd.nodes.push_back(nb);

    for (int c : Node(invocation).children) {
      const TraceRecord& cr = Rec(c);
      if (cr.kind == RecordKind::kDbCall) {
        bd.db.push_back({cr.function_name, cr.platform_id, cr.callee_name, *cr.db_op, cr.Duration()});
        continue;
      }
      const int callee = Node(c).children.front();
      const TraceRecord& callee_rec = Rec(callee);
      EdgeBreakdown e;
      e.caller = cr.function_name;
      e.callee = callee_rec.function_name;
      e.caller_platform = cr.platform_id;
      e.callee_platform = callee_rec.platform_id;
      e.duration = cr.Duration();
      e.callee_exec = callee_rec.Duration();
      std::string next_origin;
      if (nb.publisher) {
        e.kind = EdgeKind::kTrigger;
        e.trigger_delay = callee_rec.start_ts - inv.start_ts;
        e.origin_platform = origin_platform;
      } else if (cr.mode == CallMode::kAsync) {
        e.kind = EdgeKind::kPublish;
        e.publish_latency = e.duration - e.callee_exec;
        e.origin_platform = cr.platform_id;
        next_origin = cr.platform_id;
      } else {
        e.kind = EdgeKind::kSync;
        e.network = e.duration - e.callee_exec;
        e.one_way_estimate = static_cast<double>(e.network) / 2.0;
      }
      bd.edges.push_back(e);
      Describe(callee, next_origin, bd);
    }
  }

  // Backward walk from the end of the invocation. Uncovered time is
  // compute; within each group of overlapping calls the walk follows the
  // call that ended last, and covered time off the path is network wait.
  void CriticalPath(int invocation, LatencyBreakdown& bd) const {
    const std::vector<int> blocking = BlockingChildren(invocation);
    const auto groups = Groups(blocking);
    const TraceRecord& inv = Rec(invocation);
    Micros covered = 0;
    for (const auto& g : groups) {
      covered += g.end - g.start;
      Micros cursor = g.end;
      while (cursor > g.start) {
        int exact = -1;
        int straddle = -1;
        for (int c : blocking) {
          const TraceRecord& cr = Rec(c);
          if (cr.start_ts >= cursor || cr.start_ts < g.start) continue;
          if (cr.end_ts == cursor) {
            if (exact < 0 || cr.start_ts < Rec(exact).start_ts) exact = c;
          } else if (cr.end_ts > cursor) {
            if (straddle < 0 || cr.start_ts < Rec(straddle).start_ts) straddle = c;
          }
        }
        if (exact >= 0) {
          Full(exact, bd);
          cursor = Rec(exact).start_ts;
        } else if (straddle >= 0) {
          bd.total_network += cursor - Rec(straddle).start_ts;
          cursor = Rec(straddle).start_ts;
        } else {
          // Unreachable for merged groups; keep the books balanced anyway.
          bd.total_network += cursor - g.start;
          cursor = g.start;
        }
      }
    }
    bd.total_compute += inv.Duration() - covered;
  }

  void Full(int child, LatencyBreakdown& bd) const {
    const TraceRecord& cr = Rec(child);
    if (cr.kind == RecordKind::kDbCall) {
      bd.total_db += cr.Duration();
      return;
    }
    const int callee = Node(child).children.front();
    bd.total_network += cr.Duration() - Rec(callee).Duration();
    CriticalPath(callee, bd);
  }

  const CallTree& tree_;
  const std::vector<TraceRecord>& records_;
};

}  // namespace

LatencyBreakdown Decompose(const CallTree& tree, const std::vector<TraceRecord>& records) {
  if (!tree.complete) throw Error(ErrorCode::kIncompleteTree, tree.context.ToHex());
  return Decomposer(tree, records).Run();
}

std::vector<TriggerSample> TriggerMetrics(const std::vector<LatencyBreakdown>& breakdowns) {
  std::vector<TriggerSample> out;
  for (const auto& bd : breakdowns) {
    // Edges are listed depth first, so every trigger edge directly follows
    // the publish edge that reached its publisher.
    const EdgeBreakdown* publish = nullptr;
    for (const auto& e : bd.edges) {
      if (e.kind == EdgeKind::kPublish) {
        publish = &e;
      } else if (e.kind == EdgeKind::kTrigger && publish != nullptr) {
        out.push_back({bd.context, publish->caller_platform, publish->callee_platform, publish->caller, e.callee,
                       publish->publish_latency, e.trigger_delay});
        publish = nullptr;
      }
    }
  }
  return out;
}

std::vector<double> EstimateOneWayNetwork(const LatencyBreakdown& breakdown) {
  std::vector<double> out;
  for (const auto& e : breakdown.edges) {
    if (e.kind == EdgeKind::kSync) out.push_back(e.one_way_estimate);
  }
  return out;
}

double NearestRank(const std::vector<double>& sorted, double q) {
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(q * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

SummaryStats Summarize(std::vector<double> values, std::int64_t drop_count) {
  SummaryStats s;
  s.drop_count = drop_count;
  s.count = static_cast<std::int64_t>(values.size());
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  s.p25 = NearestRank(values, 0.25);
  s.p50 = NearestRank(values, 0.50);
  s.p75 = NearestRank(values, 0.75);
  const double iqr = *s.p75 - *s.p25;
  const double lo_fence = *s.p25 - 1.5 * iqr;
  const double hi_fence = *s.p75 + 1.5 * iqr;
  for (double v : values) {
    if (v >= lo_fence) {
      s.whisker_low = v;
      break;
    }
  }
  for (auto it = values.rbegin(); it != values.rend(); ++it) {
    if (*it <= hi_fence) {
      s.whisker_high = *it;
      break;
    }
  }
  return s;
}

ColdStartReport ColdStartAnalysis(const std::vector<TraceRecord>& records, const std::vector<PhaseWindow>& phases) {
  ColdStartReport rep;
  for (const auto& w : phases) rep.phases.push_back({w, 0, 0});
  for (std::size_t i = phases.size(); i-- > 0;) {
    if (phases[i].kind == PhaseKind::kBurst) {
      rep.burst_phase = i;
      break;
    }
  }
  auto phase_of = [&](Micros t) -> std::optional<std::size_t> {
    if (phases.empty()) return std::nullopt;
    for (std::size_t i = 0; i < phases.size(); ++i) {
      if (t < phases[i].end) return i;
    }
    return phases.size() - 1;
  };

  std::vector<const TraceRecord*> invocations;
  for (const auto& r : records) {
    if (r.kind == RecordKind::kInvocation) invocations.push_back(&r);
  }
  std::stable_sort(invocations.begin(), invocations.end(),
                   [](const TraceRecord* a, const TraceRecord* b) { return a->start_ts < b->start_ts; });

  std::set<std::pair<std::string, Id128>> seen;
  std::vector<double> cold_exec, warm_exec, steady;
  std::vector<std::vector<double>> bucket_exec(kTimelineBuckets);
  if (rep.burst_phase) {
    for (std::size_t b = 0; b < kTimelineBuckets; ++b) {
      rep.timeline.push_back({b, phases[*rep.burst_phase].start + static_cast<Micros>(b) * kMicrosPerSecond, 0, 0, {}});
    }
  }

  for (const TraceRecord* r : invocations) {
    const bool cold = r->cold_start.value_or(false);
    ++rep.invocations;
    if (cold) ++rep.cold;
    const bool first = seen.insert({r->platform_id, *r->executor_key}).second;
    if (first != cold) ++rep.flag_mismatches;
    if (auto p = phase_of(r->start_ts)) {
      ++rep.phases[*p].invocations;
      if (cold) ++rep.phases[*p].cold;
    }
    if (IsPublisher(*r)) continue;
    const auto exec = static_cast<double>(r->Duration());
    (cold ? cold_exec : warm_exec).push_back(exec);
    if (!rep.burst_phase) continue;
    const PhaseWindow& burst = phases[*rep.burst_phase];
    if (r->start_ts >= burst.start && r->start_ts < burst.end && !cold) steady.push_back(exec);
    if (r->start_ts >= burst.start) {
      const auto b = static_cast<std::size_t>((r->start_ts - burst.start) / kMicrosPerSecond);
      if (b < kTimelineBuckets) {
        ++rep.timeline[b].invocations;
        if (cold) ++rep.timeline[b].cold;
        bucket_exec[b].push_back(exec);
      }
    }
  }
  rep.distinct_executors = static_cast<std::int64_t>(seen.size());
  for (std::size_t b = 0; b < rep.timeline.size(); ++b) rep.timeline[b].exec = Summarize(bucket_exec[b]);
  if (!rep.timeline.empty()) rep.first_bucket_p50 = rep.timeline.front().exec.p50;
  rep.steady_p50 = Summarize(steady).p50;
  rep.cold_p50 = Summarize(cold_exec).p50;
  rep.warm_p50 = Summarize(warm_exec).p50;
  return rep;
}

const SummaryRow* Analysis::Find(std::string_view metric, std::string_view group) const {
  for (const auto& row : summary) {
    if (row.metric == metric && row.group == group) return &row;
  }
  return nullptr;
}

Analysis Analyze(const ParsedLog& log) {
  Analysis a;
  a.parse = log.report;
  a.dropped = log.dropped;
  a.total_dropped = log.total_dropped();
  a.phases = log.phases;
  a.records = static_cast<std::int64_t>(log.records.size());

  const auto trees = BuildTrees(log.records);
  a.contexts = static_cast<std::int64_t>(trees.size());
  for (const auto& t : trees) {
    if (!t.complete) {
      ++a.incomplete_trees;
      continue;
    }
    ++a.complete_trees;
    a.breakdowns.push_back(Decompose(t, log.records));
  }
  a.triggers = TriggerMetrics(a.breakdowns);
  a.coldstart = ColdStartAnalysis(log.records, log.phases);

  // metric -> group -> values; std::map keeps the output order stable.
  std::map<std::string, std::map<std::string, std::vector<double>>> metrics;
  auto add = [&](const std::string& metric, const std::string& group, double v) {
    metrics[metric][group].push_back(v);
  };
  for (const auto& bd : a.breakdowns) {
    const auto rtt = static_cast<double>(bd.root_rtt);
    add("root_rtt", "all", rtt);
    add("root_rtt", bd.workflow, rtt);
    add("tree_compute", "all", static_cast<double>(bd.total_compute));
    add("tree_network", "all", static_cast<double>(bd.total_network));
    add("tree_db", "all", static_cast<double>(bd.total_db));
    for (const auto& n : bd.nodes) {
      add("exec", n.function, static_cast<double>(n.exec));
      add("compute", n.function, static_cast<double>(n.compute));
    }
    for (const auto& e : bd.edges) {
      const std::string pair = e.caller_platform + "->" + e.callee_platform;
      if (e.kind == EdgeKind::kRoot) {
        add("root_network", pair, static_cast<double>(e.network));
      } else if (e.kind == EdgeKind::kSync) {
        add("network", "all", static_cast<double>(e.network));
        add("network", pair, static_cast<double>(e.network));
        add("one_way_estimate", "all", e.one_way_estimate);
        add("one_way_estimate", pair, e.one_way_estimate);
      }
    }
    for (const auto& d : bd.db) {
      add("db", "all", static_cast<double>(d.duration));
      add("db", d.platform + "->" + d.service, static_cast<double>(d.duration));
    }
  }
  for (const auto& t : a.triggers) {
    const std::string pair = t.origin + "->" + t.destination;
    add("publish_latency", "all", static_cast<double>(t.publish_latency));
    add("publish_latency", pair, static_cast<double>(t.publish_latency));
    add("trigger_delay", "all", static_cast<double>(t.trigger_delay));
    add("trigger_delay", pair, static_cast<double>(t.trigger_delay));
  }
  for (auto& [metric, groups] : metrics) {
    for (auto& [group, values] : groups) {
      a.summary.push_back({metric, group, Summarize(std::move(values), a.total_dropped)});
    }
  }
  return a;
}

}  // namespace faasbench
