#include <charconv>
#include <fstream>

#include "faasbench/analyzer.hpp"
#include "json.hpp"

namespace faasbench {

using nlohmann::json;

namespace {

std::string Num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string Opt(const std::optional<double>& v) { return v ? Num(*v) : ""; }

json OptJson(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json StatsJson(const SummaryStats& s) {
  return {{"count", s.count},        {"min", OptJson(s.min)},
          {"p25", OptJson(s.p25)},   {"p50", OptJson(s.p50)},
          {"p75", OptJson(s.p75)},   {"max", OptJson(s.max)},
          {"whiskerLow", OptJson(s.whisker_low)}, {"whiskerHigh", OptJson(s.whisker_high)},
          {"dropCount", s.drop_count}};
}

std::ofstream Open(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, path.string(), "cannot write report");
  return out;
}

}  // namespace

std::string SummaryJson(const Analysis& a) {
  json j;
  j["parse"] = {{"lines", a.parse.lines},
                {"records", a.parse.records},
                {"parseErrors", a.parse.parse_errors},
                {"metadataLines", a.parse.metadata_lines},
                {"headerSeen", a.parse.header_seen}};
  j["dropped"] = a.dropped;
  j["totalDropped"] = a.total_dropped;
  j["records"] = a.records;
  j["contexts"] = a.contexts;
  j["completeTrees"] = a.complete_trees;
  j["incompleteTrees"] = a.incomplete_trees;

  json phases = json::array();
  for (const auto& p : a.coldstart.phases) {
    phases.push_back({{"index", p.window.index},
                      {"kind", std::string(PhaseKindName(p.window.kind))},
                      {"startUs", p.window.start},
                      {"endUs", p.window.end},
                      {"invocations", p.invocations},
                      {"coldStarts", p.cold}});
  }
  j["coldStart"] = {{"invocations", a.coldstart.invocations},
                    {"coldStarts", a.coldstart.cold},
                    {"distinctExecutors", a.coldstart.distinct_executors},
                    {"flagMismatches", a.coldstart.flag_mismatches},
                    {"phases", std::move(phases)},
                    {"firstBucketP50Us", OptJson(a.coldstart.first_bucket_p50)},
                    {"steadyP50Us", OptJson(a.coldstart.steady_p50)},
                    {"coldP50Us", OptJson(a.coldstart.cold_p50)},
                    {"warmP50Us", OptJson(a.coldstart.warm_p50)}};

  json metrics = json::array();
  for (const auto& row : a.summary) {
    json r = StatsJson(row.stats);
    r["metric"] = row.metric;
    r["group"] = row.group;
    metrics.push_back(std::move(r));
  }
  j["metricsUs"] = std::move(metrics);
  return j.dump(2) + "\n";
}

void WriteReports(const Analysis& a, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  Open(dir / "summary.json") << SummaryJson(a);

  {
    auto out = Open(dir / "summary.csv");
    out << "metric,group,count,min_us,p25_us,p50_us,p75_us,max_us,whisker_low_us,whisker_high_us,drop_count\n";
    for (const auto& row : a.summary) {
      const auto& s = row.stats;
      out << row.metric << ',' << row.group << ',' << s.count << ',' << Opt(s.min) << ',' << Opt(s.p25) << ','
          << Opt(s.p50) << ',' << Opt(s.p75) << ',' << Opt(s.max) << ',' << Opt(s.whisker_low) << ','
          << Opt(s.whisker_high) << ',' << s.drop_count << '\n';
    }
  }
  {
    auto out = Open(dir / "latency_breakdown.csv");
    out << "context,workflow,root_rtt_us,compute_us,network_us,db_us,residual_us\n";
    for (const auto& bd : a.breakdowns) {
      out << bd.context.ToHex() << ',' << bd.workflow << ',' << bd.root_rtt << ',' << bd.total_compute << ','
          << bd.total_network << ',' << bd.total_db << ',' << bd.residual() << '\n';
    }
  }
  {
    auto out = Open(dir / "edges.csv");
    out << "context,kind,caller,callee,caller_platform,callee_platform,duration_us,callee_exec_us,network_us,"
           "one_way_estimate_us,publish_latency_us,trigger_delay_us\n";
    for (const auto& bd : a.breakdowns) {
      for (const auto& e : bd.edges) {
        out << bd.context.ToHex() << ',' << EdgeKindName(e.kind) << ',' << e.caller << ',' << e.callee << ','
            << e.caller_platform << ',' << e.callee_platform << ',' << e.duration << ',' << e.callee_exec << ',';
        const bool sync = e.kind == EdgeKind::kSync || e.kind == EdgeKind::kRoot;
        out << (sync ? std::to_string(e.network) : "") << ',' << (sync ? Num(e.one_way_estimate) : "") << ','
            << (e.kind == EdgeKind::kPublish ? std::to_string(e.publish_latency) : "") << ','
            << (e.kind == EdgeKind::kTrigger ? std::to_string(e.trigger_delay) : "") << '\n';
      }
    }
  }
  {
    auto out = Open(dir / "trigger_delays.csv");
    out << "context,origin,destination,caller,target,publish_latency_us,trigger_delay_us\n";
    for (const auto& t : a.triggers) {
      out << t.context.ToHex() << ',' << t.origin << ',' << t.destination << ',' << t.caller << ',' << t.target << ','
          << t.publish_latency << ',' << t.trigger_delay << '\n';
    }
  }
  {
    auto out = Open(dir / "coldstart.csv");
    out << "phase,kind,start_us,end_us,invocations,cold_starts\n";
    for (const auto& p : a.coldstart.phases) {
      out << p.window.index << ',' << PhaseKindName(p.window.kind) << ',' << p.window.start << ',' << p.window.end
          << ',' << p.invocations << ',' << p.cold << '\n';
    }
  }
  {
    auto out = Open(dir / "coldstart_timeline.csv");
    out << "second,start_us,invocations,cold_starts,exec_p25_us,exec_p50_us,exec_p75_us,exec_max_us\n";
    for (const auto& b : a.coldstart.timeline) {
      out << b.index << ',' << b.start << ',' << b.invocations << ',' << b.cold << ',' << Opt(b.exec.p25) << ','
          << Opt(b.exec.p50) << ',' << Opt(b.exec.p75) << ',' << Opt(b.exec.max) << '\n';
    }
  }
}

}  // namespace faasbench
