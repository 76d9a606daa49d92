#include "faasbench/loadgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "faasbench/sim.hpp"
#include "json.hpp"

namespace faasbench {

using nlohmann::json;

std::string_view PhaseKindName(PhaseKind kind) {
  switch (kind) {
    case PhaseKind::kConstantRate: return "constantRate";
    case PhaseKind::kPeriodic: return "periodic";
    case PhaseKind::kPause: return "pause";
    case PhaseKind::kBurst: return "burst";
  }
  return "?";
}

const Workflow* LoadProfile::FindWorkflow(std::string_view wf) const {
  for (const auto& w : workflows) {
    if (w.name == wf) return &w;
  }
  return nullptr;
}

namespace {

[[noreturn]] void Bad(const std::string& subject, const std::string& what) {
  throw Error(ErrorCode::kInvalidProfile, subject, what);
}

WorkflowStep Step(std::string entry, std::string route = {}, std::int64_t payload = 256,
                  DurationDistribution think = DurationDistribution::UniformMs(500, 1500)) {
  return WorkflowStep{std::move(entry), std::move(route), payload, std::move(think)};
}

Phase Periodic(std::string name, Micros duration, std::vector<PeriodicEntry> entries) {
  Phase p;
  p.kind = PhaseKind::kPeriodic;
  p.name = std::move(name);
  p.duration = duration;
  p.entries = std::move(entries);
  return p;
}

LoadProfile WebShopProfile() {
  LoadProfile lp;
  lp.name = "webshop-default";
  lp.workflows = {
      {"browse", {Step("frontend", "home"), Step("frontend", "product"), Step("frontend", "product")}},
      {"shopping",
       {Step("frontend", "home"), Step("frontend", "product"), Step("frontend", "addCart"), Step("frontend", "cart")}},
      {"purchase",
       {Step("frontend", "login"), Step("frontend", "addCart"), Step("frontend", "cart"),
        Step("frontend", "checkout")}},
      {"currency", {Step("frontend", "setCurrency"), Step("frontend", "home"), Step("frontend", "product")}},
  };
  Phase p;
  p.kind = PhaseKind::kConstantRate;
  p.name = "steady";
  p.duration = 900 * kMicrosPerSecond;
  p.rate = 20;
  p.mix = {{"browse", 0.25}, {"shopping", 0.25}, {"purchase", 0.25}, {"currency", 0.25}};
  lp.phases = {p};
  return lp;
}

LoadProfile SmartCityProfile() {
  LoadProfile lp;
  lp.name = "smartcity-default";
  lp.workflows = {
      {"traffic", {Step("trafficSensorFilter", {}, 256)}},
      {"image", {Step("objectRecognition", {}, 16384)}},
      {"weather", {Step("weatherSensorFilter", {}, 128)}},
      // An emergency is raised and cleared five seconds later.
      {"emergency",
       {Step("emergencyDetection", {}, 64, DurationDistribution::Fixed(5000)), Step("emergencyDetection", {}, 64)}},
  };
  const Micros s = kMicrosPerSecond;
  lp.phases = {Periodic("sensors", 900 * s,
                        {{"traffic", 2 * s, std::nullopt},
                         {"image", 2 * s, std::nullopt},
                         {"weather", 20 * s, std::nullopt},
                         {"emergency", 120 * s, std::nullopt}})};
  return lp;
}

LoadProfile SmartFactoryProfile() {
  LoadProfile lp;
  lp.name = "smartfactory-default";
  lp.workflows = {
      {"couch-small", {Step("orderSupplies", "small", 512)}},
      {"couch-medium", {Step("orderSupplies", "medium", 512)}},
      {"couch-large", {Step("orderSupplies", "large", 512)}},
  };
  const Micros s = kMicrosPerSecond;
  // One couch every five seconds, cycling through the three models.
  lp.phases = {Periodic("orders", 900 * s,
                        {{"couch-small", 15 * s, 5 * s},
                         {"couch-medium", 15 * s, 10 * s},
                         {"couch-large", 15 * s, 15 * s}})};
  return lp;
}

LoadProfile StreamingProfile() {
  LoadProfile lp;
  lp.name = "streaming-default";
  const auto think = DurationDistribution::UniformMs(200, 800);
  lp.workflows = {
      {"register", {Step("registerUser", {}, 256, think), Step("registerDevice", {}, 256, think)}},
      {"upload", {Step("addVideo", {}, 8192, think), Step("updateMetadata", {}, 128, think)}},
      {"watch", {Step("requestVideo", {}, 128, think), Step("updateMetadata", {}, 128, think)}},
      {"metadata", {Step("updateMetadata", {}, 128, think)}},
      {"reconnect", {Step("authenticate", {}, 128, think), Step("updateMetadata", {}, 128, think)}},
  };
  const Micros s = kMicrosPerSecond;
  Phase registration;
  registration.kind = PhaseKind::kBurst;
  registration.name = "registration";
  registration.duration = 30 * s;
  registration.total_flows = 50;
  registration.mix = {{"register", 1.0}};

  Phase normal;
  normal.kind = PhaseKind::kConstantRate;
  normal.name = "normal";
  normal.duration = 300 * s;
  normal.rate = 500.0 / 300.0;
  normal.mix = {{"upload", 0.3}, {"watch", 0.5}, {"metadata", 0.2}};

  Phase outage;
  outage.kind = PhaseKind::kPause;
  outage.name = "outage";
  outage.duration = 1200 * s;

  Phase peak;
  peak.kind = PhaseKind::kBurst;
  peak.name = "peak";
  peak.duration = 300 * s;
  peak.total_flows = 1500;
  peak.mix = {{"reconnect", 1.0}};

  lp.phases = {registration, normal, outage, peak};
  return lp;
}

json DistJson(const DurationDistribution& d) { return d.ToString(); }

DurationDistribution DistFrom(const json& j) {
  if (j.is_number()) return DurationDistribution::Fixed(j.get<double>());
  return DurationDistribution::Parse(j.get<std::string>());
}

double Seconds(Micros us) { return static_cast<double>(us) / kMicrosPerSecond; }
Micros FromSeconds(double s) { return static_cast<Micros>(std::llround(s * kMicrosPerSecond)); }

std::int64_t RoundCount(double x) { return static_cast<std::int64_t>(std::llround(x)); }

std::size_t PickWeighted(const std::vector<std::size_t>& idx, const std::vector<double>& weights, Rng& rng) {
  double total = 0;
  for (double w : weights) total += w;
  double u = rng.Uniform01() * total;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (u < weights[i]) return idx[i];
    u -= weights[i];
  }
  return idx.back();
}

}  // namespace

LoadProfile BuiltinProfile(std::string_view benchmark) {
  if (benchmark == "webshop") return WebShopProfile();
  if (benchmark == "smartcity") return SmartCityProfile();
  if (benchmark == "smartfactory") return SmartFactoryProfile();
  if (benchmark == "streaming") return StreamingProfile();
  throw Error(ErrorCode::kUnknownBenchmark, std::string(benchmark));
}

std::string LoadProfileToJson(const LoadProfile& lp) {
  json j;
  j["name"] = lp.name;
  j["scaleFactor"] = lp.scale_factor;
  j["scaleDurations"] = lp.scale_durations;
  json wfs = json::array();
  for (const auto& w : lp.workflows) {
    json steps = json::array();
    for (const auto& s : w.steps) {
      json sj = {{"entry", s.entry}, {"payload", s.payload_bytes}, {"think", DistJson(s.think)}};
      if (!s.route.empty()) sj["route"] = s.route;
      steps.push_back(std::move(sj));
    }
    wfs.push_back({{"name", w.name}, {"steps", std::move(steps)}});
  }
  j["workflows"] = std::move(wfs);
  json phases = json::array();
  for (const auto& p : lp.phases) {
    json pj = {{"kind", std::string(PhaseKindName(p.kind))}, {"name", p.name}, {"durationS", Seconds(p.duration)}};
    if (p.kind == PhaseKind::kConstantRate) pj["rate"] = p.rate;
    if (p.kind == PhaseKind::kBurst) pj["totalFlows"] = p.total_flows;
    if (!p.mix.empty()) {
      json mix = json::array();
      for (const auto& m : p.mix) mix.push_back({{"workflow", m.workflow}, {"weight", m.weight}});
      pj["mix"] = std::move(mix);
    }
    if (p.kind == PhaseKind::kPeriodic) {
      json entries = json::array();
      for (const auto& e : p.entries) {
        json ej = {{"workflow", e.workflow}, {"intervalS", Seconds(e.interval)}};
        if (e.offset) ej["offsetS"] = Seconds(*e.offset);
        entries.push_back(std::move(ej));
      }
      pj["entries"] = std::move(entries);
    }
    phases.push_back(std::move(pj));
  }
  j["phases"] = std::move(phases);
  return j.dump(2);
}

LoadProfile LoadProfileFromJson(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    Bad("profile", e.what());
  }
  try {
    LoadProfile lp;
    lp.name = j.value("name", std::string());
    lp.scale_factor = j.value("scaleFactor", 1.0);
    lp.scale_durations = j.value("scaleDurations", false);
    for (const auto& wj : j.at("workflows")) {
      Workflow w;
      w.name = wj.at("name").get<std::string>();
      for (const auto& sj : wj.at("steps")) {
        WorkflowStep s;
        s.entry = sj.at("entry").get<std::string>();
        s.route = sj.value("route", std::string());
        s.payload_bytes = sj.value("payload", std::int64_t{0});
        if (sj.contains("think")) s.think = DistFrom(sj.at("think"));
        w.steps.push_back(std::move(s));
      }
      lp.workflows.push_back(std::move(w));
    }
    for (const auto& pj : j.at("phases")) {
      Phase p;
      const std::string kind = pj.at("kind").get<std::string>();
      if (kind == "constantRate") {
        p.kind = PhaseKind::kConstantRate;
      } else if (kind == "periodic") {
        p.kind = PhaseKind::kPeriodic;
      } else if (kind == "pause") {
        p.kind = PhaseKind::kPause;
      } else if (kind == "burst") {
        p.kind = PhaseKind::kBurst;
      } else {
        Bad("phase", "unknown phase kind '" + kind + "'");
      }
      p.name = pj.value("name", kind);
      p.duration = FromSeconds(pj.at("durationS").get<double>());
      p.rate = pj.value("rate", 0.0);
      p.total_flows = pj.value("totalFlows", std::int64_t{0});
      if (pj.contains("mix")) {
        for (const auto& mj : pj.at("mix")) p.mix.push_back({mj.at("workflow").get<std::string>(), mj.value("weight", 1.0)});
      }
      if (pj.contains("entries")) {
        for (const auto& ej : pj.at("entries")) {
          PeriodicEntry e;
          e.workflow = ej.at("workflow").get<std::string>();
          e.interval = FromSeconds(ej.at("intervalS").get<double>());
          if (ej.contains("offsetS")) e.offset = FromSeconds(ej.at("offsetS").get<double>());
          p.entries.push_back(std::move(e));
        }
      }
      lp.phases.push_back(std::move(p));
    }
    ValidateProfile(lp);
    return lp;
  } catch (const json::exception& e) {
    Bad("profile", e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidProfile) throw;
    Bad("profile", e.what());
  }
}

LoadProfile LoadProfileFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, path.string(), "cannot open load profile");
  std::stringstream buf;
  buf << in.rdbuf();
  return LoadProfileFromJson(buf.str());
}

void ValidateProfile(const LoadProfile& lp) {
  if (!(lp.scale_factor > 0) || !std::isfinite(lp.scale_factor)) Bad("scaleFactor", "must be positive");
  if (lp.phases.empty()) Bad("phases", "profile has no phases");
  std::set<std::string> names;
  for (const auto& w : lp.workflows) {
    if (!names.insert(w.name).second) Bad(w.name, "duplicate workflow");
    if (w.steps.empty()) Bad(w.name, "workflow has no steps");
  }
  Micros total = 0;
  for (const auto& p : lp.phases) {
    if (p.duration < 0) Bad(p.name, "negative duration");
    total += p.duration;
    auto check_mix = [&] {
      if (p.mix.empty()) Bad(p.name, "phase needs a workflow mix");
      double sum = 0;
      for (const auto& m : p.mix) {
        if (lp.FindWorkflow(m.workflow) == nullptr) Bad(m.workflow, "unknown workflow");
        if (!(m.weight >= 0)) Bad(p.name, "negative weight");
        sum += m.weight;
      }
      if (std::abs(sum - 1.0) > 1e-9) Bad(p.name, "mix weights must sum to 1");
    };
    switch (p.kind) {
      case PhaseKind::kConstantRate:
        if (!(p.rate >= 0)) Bad(p.name, "negative rate");
        check_mix();
        break;
      case PhaseKind::kBurst:
        if (p.total_flows < 1) Bad(p.name, "burst needs totalFlows >= 1");
        check_mix();
        break;
      case PhaseKind::kPeriodic:
        if (p.entries.empty()) Bad(p.name, "periodic phase needs entries");
        for (const auto& e : p.entries) {
          if (lp.FindWorkflow(e.workflow) == nullptr) Bad(e.workflow, "unknown workflow");
          if (e.interval <= 0) Bad(p.name, "periodic interval must be positive");
          if (e.offset && *e.offset < 0) Bad(p.name, "negative offset");
        }
        break;
      case PhaseKind::kPause:
        break;
    }
  }
  if (total <= 0) Bad("phases", "total duration must be positive");
}

void ValidateProfile(const LoadProfile& lp, const ApplicationSpec& app) {
  ValidateProfile(lp);
  for (const auto& w : lp.workflows) {
    for (const auto& s : w.steps) {
      const FunctionSpec* f = app.Find(s.entry);
      if (f == nullptr) Bad(s.entry, "workflow '" + w.name + "' enters through an unknown function");
      if (!f->entry_point) Bad(s.entry, "workflow '" + w.name + "' enters through a non-entry function");
      if (f->FindBody(s.route) == nullptr) Bad(s.entry, "unknown route '" + s.route + "'");
    }
  }
}

LoadSchedule ScheduleProfile(const LoadProfile& lp, std::uint64_t seed) {
  ValidateProfile(lp);
  Rng rng(DeriveSeed(seed, "loadgen"));
  const double scale = lp.scale_factor;
  auto workflow_index = [&](const std::string& name) {
    for (std::size_t i = 0; i < lp.workflows.size(); ++i) {
      if (lp.workflows[i].name == name) return i;
    }
    return std::size_t{0};
  };

  LoadSchedule out;
  Micros start = 0;
  for (std::size_t pi = 0; pi < lp.phases.size(); ++pi) {
    const Phase& p = lp.phases[pi];
    const Micros duration =
        lp.scale_durations ? static_cast<Micros>(std::llround(static_cast<double>(p.duration) * scale)) : p.duration;
    const Micros end = start + duration;
    out.phases.push_back({pi, p.kind, p.name, start, end});

    std::vector<std::size_t> mix_idx;
    std::vector<double> mix_w;
    for (const auto& m : p.mix) {
      mix_idx.push_back(workflow_index(m.workflow));
      mix_w.push_back(m.weight);
    }

    switch (p.kind) {
      case PhaseKind::kConstantRate: {
        const std::int64_t n = RoundCount(p.rate * Seconds(p.duration) * scale);
        std::vector<Micros> times;
        times.reserve(static_cast<std::size_t>(n));
        for (std::int64_t i = 0; i < n; ++i) {
          times.push_back(start + static_cast<Micros>(rng.Uniform01() * static_cast<double>(duration)));
        }
        std::sort(times.begin(), times.end());
        for (Micros t : times) out.arrivals.push_back({t, PickWeighted(mix_idx, mix_w, rng), pi});
        break;
      }
      case PhaseKind::kPeriodic: {
        std::vector<Arrival> phase_arrivals;
        for (const auto& e : p.entries) {
          auto stretch = [&](Micros v) {
            return lp.scale_durations ? v : static_cast<Micros>(std::llround(static_cast<double>(v) / scale));
          };
          const Micros interval = std::max<Micros>(1, stretch(e.interval));
          const Micros first = start + (e.offset ? stretch(*e.offset) : interval);
          const std::size_t wf = workflow_index(e.workflow);
          for (Micros t = first; t <= end; t += interval) phase_arrivals.push_back({t, wf, pi});
        }
        std::stable_sort(phase_arrivals.begin(), phase_arrivals.end(),
                         [](const Arrival& a, const Arrival& b) { return a.at < b.at; });
        out.arrivals.insert(out.arrivals.end(), phase_arrivals.begin(), phase_arrivals.end());
        break;
      }
      case PhaseKind::kBurst: {
        const std::int64_t n = std::max<std::int64_t>(1, RoundCount(static_cast<double>(p.total_flows) * scale));
        for (std::int64_t i = 0; i < n; ++i) {
          out.arrivals.push_back({start + duration * i / n, PickWeighted(mix_idx, mix_w, rng), pi});
        }
        break;
      }
      case PhaseKind::kPause:
        break;
    }
    start = end;
  }
  std::stable_sort(out.arrivals.begin(), out.arrivals.end(),
                   [](const Arrival& a, const Arrival& b) { return a.at < b.at; });
  return out;
}

namespace {

struct WorkflowRun {
  SimWorld* world;
  const Workflow* workflow;
  std::vector<std::string> endpoints;
};

void RunStep(const std::shared_ptr<WorkflowRun>& run, std::size_t index, Micros at) {
  SimWorld& world = *run->world;
  const WorkflowStep& step = run->workflow->steps[index];
  CallOrigin origin;
  origin.platform = std::string(kLoadgenPlatform);
  origin.function = run->workflow->name;
  origin.context = NewContext(world.ids());
  origin.truth_node = world.AddTruthRoot(origin.context, run->workflow->name);
  world.RemoteCall(origin, run->endpoints[index], CallMode::kSync, at, step.payload_bytes, step.route,
                   [run, index](Micros done_at, std::int64_t) {
                     if (index + 1 >= run->workflow->steps.size()) return;
                     SimWorld& w = *run->world;
                     const Micros next_at = done_at + run->workflow->steps[index].think.Sample(w.rng());
                     w.Schedule(next_at, [run, index, next_at] { RunStep(run, index + 1, next_at); });
                   });
}

}  // namespace

ExecutionStats Execute(const LoadSchedule& schedule, const LoadProfile& profile, SimWorld& world) {
  std::vector<std::vector<std::string>> endpoints(profile.workflows.size());
  for (std::size_t i = 0; i < profile.workflows.size(); ++i) {
    for (const auto& s : profile.workflows[i].steps) {
      const EndpointBinding* b = world.plan().Resolve(s.entry);
      if (b == nullptr) throw Error(ErrorCode::kUnknownEndpoint, s.entry);
      endpoints[i].push_back(b->endpoint);
    }
  }
  ExecutionStats stats;
  for (const auto& a : schedule.arrivals) {
    auto run = std::make_shared<WorkflowRun>(WorkflowRun{&world, &profile.workflows.at(a.workflow), endpoints[a.workflow]});
    ++stats.workflows;
    stats.root_calls += static_cast<std::int64_t>(run->workflow->steps.size());
    world.Schedule(a.at, [run, at = a.at] { RunStep(run, 0, at); });
  }
  return stats;
}

}  // namespace faasbench
