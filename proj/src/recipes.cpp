#include "faasbench/pipeline.hpp"

namespace faasbench {

namespace {

constexpr const char* kStore = "kvstore";

DurationDistribution Ln(double median_ms, double sigma = 0.2) { return DurationDistribution::LogNormalMs(median_ms, sigma); }

PlatformSpec Cloud(std::string id, double trigger_ms, double publisher_ms, double cold_ms) {
  PlatformSpec p;
  p.id = std::move(id);
  p.cold_start_delay = Ln(cold_ms, 0.25);
  p.trigger_delay = Ln(trigger_ms, 0.3);
  p.publisher_exec = Ln(publisher_ms, 0.3);
  p.memory_label = "256MB";
  return p;
}

// Three clouds and one edge site. Clouds reach each other in 25-35 ms and
// the edge in 40 ms; the store lives next to cloud-a.
std::vector<PlatformSpec> Platforms() {
  PlatformSpec a = Cloud("cloud-a", 100, 40, 400);
  a.network = {{"cloud-a", Ln(5)}, {"cloud-b", Ln(25)}, {"cloud-c", Ln(30)}, {"edge", Ln(40)},
               {"loadgen", Ln(10)}, {kStore, Ln(3)}};
  PlatformSpec b = Cloud("cloud-b", 180, 10, 250);
  b.log_line_rate_limit = 250;
  b.network = {{"cloud-b", Ln(5)}, {"cloud-c", Ln(35)}, {"edge", Ln(40)}, {"loadgen", Ln(15)}, {kStore, Ln(25)}};
  PlatformSpec c = Cloud("cloud-c", 700, 700, 600);
  c.network = {{"cloud-c", Ln(5)}, {"edge", Ln(40)}, {"loadgen", Ln(20)}, {kStore, Ln(30)}};
  PlatformSpec edge = Cloud("edge", 5, 2, 100);
  edge.memory_label = "edge-node";
  edge.network = {{"edge", Ln(1)}, {"loadgen", Ln(40)}, {kStore, Ln(83)}};
  return {a, b, c, edge};
}

DeploymentConfig Base(std::string benchmark) {
  DeploymentConfig cfg;
  cfg.benchmark = std::move(benchmark);
  cfg.platforms = Platforms();
  cfg.service_bindings[kStore] = {"cloud-a", "same-region"};
  return cfg;
}

void AssignAll(DeploymentConfig& cfg, const std::string& platform) {
  for (const auto& f : LoadBuiltin(cfg.benchmark).functions) cfg.assignment[f.name] = platform;
}

// Load generator next to the edge site: 1 ms to the edge, 40 ms to clouds.
void LoadgenAtEdge(DeploymentConfig& cfg) {
  for (auto& p : cfg.platforms) p.network["loadgen"] = Ln(p.id == "edge" ? 1 : 40);
}

LoadProfile Exp2Profile() {
  LoadProfile lp = BuiltinProfile("smartcity");
  lp.name = "smartcity-exp2";
  for (auto& e : lp.phases.front().entries) {
    if (e.workflow == "weather") e.interval = 10 * kMicrosPerSecond;
  }
  return lp;
}

Recipe Exp1() {
  Recipe r{"exp1-single-cloud", "All 17 web shop functions and the store on cloud-a.", Base("webshop"),
           BuiltinProfile("webshop")};
  AssignAll(r.config, "cloud-a");
  return r;
}

Recipe Exp2EdgeCloud() {
  Recipe r{"exp2-edge-cloud", "Smart city: light-phase functions on the edge, the rest on cloud-a.", Base("smartcity"),
           Exp2Profile()};
  AssignAll(r.config, "cloud-a");
  r.config.assignment["calculateLightPhase"] = "edge";
  r.config.assignment["setLightPhase"] = "edge";
  LoadgenAtEdge(r.config);
  return r;
}

Recipe Exp2EdgeOnly() {
  Recipe r{"exp2-edge-only", "Smart city: every function on the edge, store in the cloud.", Base("smartcity"),
           Exp2Profile()};
  AssignAll(r.config, "edge");
  LoadgenAtEdge(r.config);
  return r;
}

Recipe Exp3() {
  Recipe r{"exp3-three-way-factory", "Smart factory split into couch, panel and cushion parts on three clouds.",
           Base("smartfactory"), BuiltinProfile("smartfactory")};
  r.config.assignment = {
      {"orderSupplies", "cloud-a"}, {"billing", "cloud-a"},        {"payment", "cloud-a"},
      {"orderPanel", "cloud-b"},    {"producePanel", "cloud-b"},   {"orderCushion", "cloud-c"},
      {"produceCushion", "cloud-c"},
  };
  return r;
}

Recipe Exp4() {
  Recipe r{"exp4-coldstart", "Streaming service on cloud-a with a 60 s keep-alive; the outage outlasts it.",
           Base("streaming"), BuiltinProfile("streaming")};
  AssignAll(r.config, "cloud-a");
  for (auto& p : r.config.platforms) p.keep_alive = 60 * kMicrosPerSecond;
  r.profile.scale_durations = true;
  return r;
}

}  // namespace

std::vector<std::string> RecipeNames() {
  return {"exp1-single-cloud", "exp2-edge-cloud", "exp2-edge-only", "exp3-three-way-factory", "exp4-coldstart"};
}

Recipe LoadRecipe(std::string_view name) {
  if (name == "exp1-single-cloud") return Exp1();
  if (name == "exp2-edge-cloud") return Exp2EdgeCloud();
  if (name == "exp2-edge-only") return Exp2EdgeOnly();
  if (name == "exp3-three-way-factory") return Exp3();
  if (name == "exp4-coldstart") return Exp4();
  throw Error(ErrorCode::kUnknownRecipe, std::string(name));
}

std::string DefaultRecipeFor(std::string_view benchmark) {
  if (benchmark == "webshop") return "exp1-single-cloud";
  if (benchmark == "smartcity") return "exp2-edge-cloud";
  if (benchmark == "smartfactory") return "exp3-three-way-factory";
  if (benchmark == "streaming") return "exp4-coldstart";
  throw Error(ErrorCode::kUnknownBenchmark, std::string(benchmark));
}

}  // namespace faasbench
