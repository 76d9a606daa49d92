#include <fstream>
#include <sstream>

#include "faasbench/app_model.hpp"
#include "json.hpp"

namespace faasbench {

using nlohmann::json;

namespace {

[[noreturn]] void Bad(const std::string& what) { throw Error(ErrorCode::kInvalidConfig, "application", what); }

json StepsToJson(const StepList& steps);

json StepToJson(const BodyStep& s) {
  json j;
  switch (s.kind) {
    case StepKind::kCompute:
      j["compute"] = s.compute_time.ToString();
      break;
    case StepKind::kCall:
      j["call"] = s.target;
      if (!s.route.empty()) j["route"] = s.route;
      j["payload"] = s.payload_bytes;
      break;
    case StepKind::kPublish:
      j["publish"] = s.target;
      j["payload"] = s.payload_bytes;
      break;
    case StepKind::kDbGet:
      j["dbGet"] = s.service;
      j["key"] = s.key;
      break;
    case StepKind::kDbSet:
      j["dbSet"] = s.service;
      j["key"] = s.key;
      j["valueSize"] = s.value_bytes;
      break;
    case StepKind::kParallel: {
      json branches = json::array();
      for (const auto& b : s.branches) branches.push_back(StepsToJson(b));
      j["parallel"] = std::move(branches);
      break;
    }
    case StepKind::kReturn:
      j["return"] = s.payload_bytes;
      break;
  }
  return j;
}

json StepsToJson(const StepList& steps) {
  json arr = json::array();
  for (const auto& s : steps) arr.push_back(StepToJson(s));
  return arr;
}

StepList StepsFromJson(const json& arr);

BodyStep StepFromJson(const json& j) {
  if (!j.is_object()) Bad("step must be an object");
  if (j.contains("compute")) {
    const json& c = j.at("compute");
    return BodyStep::Compute(c.is_number() ? DurationDistribution::Fixed(c.get<double>())
                                           : DurationDistribution::Parse(c.get<std::string>()));
  }
  if (j.contains("call")) {
    return BodyStep::Call(j.at("call").get<std::string>(), j.value("payload", std::int64_t{0}),
                          j.value("route", std::string()));
  }
  if (j.contains("publish")) {
    return BodyStep::Publish(j.at("publish").get<std::string>(), j.value("payload", std::int64_t{0}));
  }
  if (j.contains("dbGet")) return BodyStep::DbGet(j.at("dbGet").get<std::string>(), j.value("key", std::string()));
  if (j.contains("dbSet")) {
    return BodyStep::DbSet(j.at("dbSet").get<std::string>(), j.value("key", std::string()),
                           j.value("valueSize", std::int64_t{0}));
  }
  if (j.contains("parallel")) {
    std::vector<StepList> branches;
    for (const auto& b : j.at("parallel")) branches.push_back(StepsFromJson(b));
    return BodyStep::Parallel(std::move(branches));
  }
  if (j.contains("return")) return BodyStep::Return(j.at("return").get<std::int64_t>());
  Bad("unknown step kind in " + j.dump());
}

StepList StepsFromJson(const json& arr) {
  if (!arr.is_array()) Bad("step list must be an array");
  StepList steps;
  for (const auto& j : arr) steps.push_back(StepFromJson(j));
  return steps;
}

}  // namespace

std::string ApplicationToJson(const ApplicationSpec& app) {
  json j;
  j["name"] = app.name;
  j["description"] = app.description;
  j["externalServices"] = app.external_services;
  json fns = json::array();
  for (const auto& f : app.functions) {
    json fj;
    fj["name"] = f.name;
    fj["trigger"] = std::string(TriggerKindName(f.trigger));
    fj["entryPoint"] = f.entry_point;
    fj["body"] = StepsToJson(f.body);
    if (!f.routes.empty()) {
      json routes = json::object();
      for (const auto& [name, steps] : f.routes) routes[name] = StepsToJson(steps);
      fj["routes"] = std::move(routes);
    }
    fns.push_back(std::move(fj));
  }
  j["functions"] = std::move(fns);
  return j.dump(2);
}

ApplicationSpec ApplicationFromJson(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    Bad(e.what());
  }
  try {
    ApplicationSpec app;
    app.name = j.at("name").get<std::string>();
    app.description = j.value("description", std::string());
    if (j.contains("externalServices")) app.external_services = j.at("externalServices").get<std::vector<std::string>>();
    for (const auto& fj : j.at("functions")) {
      FunctionSpec f;
      f.name = fj.at("name").get<std::string>();
      const std::string trigger = fj.value("trigger", std::string("http"));
      if (trigger == "http") {
        f.trigger = TriggerKind::kHttpSync;
      } else if (trigger == "event") {
        f.trigger = TriggerKind::kEventAsync;
      } else {
        Bad("unknown trigger '" + trigger + "'");
      }
      f.entry_point = fj.value("entryPoint", false);
      f.body = StepsFromJson(fj.value("body", json::array()));
      if (fj.contains("routes")) {
        for (const auto& [name, steps] : fj.at("routes").items()) f.routes[name] = StepsFromJson(steps);
      }
      app.functions.push_back(std::move(f));
    }
    return app;
  } catch (const json::exception& e) {
    Bad(e.what());
  }
}

ApplicationSpec LoadApplicationFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, path.string(), "cannot open application file");
  std::stringstream buf;
  buf << in.rdbuf();
  return ApplicationFromJson(buf.str());
}

}  // namespace faasbench
