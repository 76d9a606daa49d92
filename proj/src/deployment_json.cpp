#include <fstream>
#include <sstream>

#include "faasbench/deployment.hpp"
#include "json.hpp"

namespace faasbench {

using nlohmann::json;

namespace {

[[noreturn]] void Bad(const std::string& what) { throw Error(ErrorCode::kInvalidConfig, "deployment", what); }

DurationDistribution Dist(const json& j) {
  if (j.is_number()) return DurationDistribution::Fixed(j.get<double>());
  return DurationDistribution::Parse(j.get<std::string>());
}

json PlatformToJson(const PlatformSpec& p) {
  json j;
  j["id"] = p.id;
  j["coldStartDelay"] = p.cold_start_delay.ToString();
  j["keepAliveMs"] = static_cast<double>(p.keep_alive) / kMicrosPerMilli;
  json net = json::object();
  for (const auto& [peer, d] : p.network) net[peer] = d.ToString();
  j["network"] = std::move(net);
  j["triggerDelay"] = p.trigger_delay.ToString();
  j["publisherExec"] = p.publisher_exec.ToString();
  if (p.log_line_rate_limit) {
    j["logLineRateLimit"] = *p.log_line_rate_limit;
  } else {
    j["logLineRateLimit"] = "unlimited";
  }
  j["clockOffsetMs"] = static_cast<double>(p.clock_offset) / kMicrosPerMilli;
  if (p.bandwidth_bytes_per_ms > 0) j["bandwidthBytesPerMs"] = p.bandwidth_bytes_per_ms;
  if (!p.memory_label.empty()) j["memory"] = p.memory_label;
  return j;
}

PlatformSpec PlatformFromJson(const json& j) {
  PlatformSpec p;
  p.id = j.at("id").get<std::string>();
  if (j.contains("coldStartDelay")) p.cold_start_delay = Dist(j.at("coldStartDelay"));
  if (j.contains("keepAliveMs")) p.keep_alive = MillisToMicros(j.at("keepAliveMs").get<double>());
  if (j.contains("network")) {
    for (const auto& [peer, d] : j.at("network").items()) p.network[peer] = Dist(d);
  }
  if (j.contains("triggerDelay")) p.trigger_delay = Dist(j.at("triggerDelay"));
  if (j.contains("publisherExec")) p.publisher_exec = Dist(j.at("publisherExec"));
  if (j.contains("logLineRateLimit")) {
    const json& lim = j.at("logLineRateLimit");
    if (lim.is_string()) {
      if (lim.get<std::string>() != "unlimited") Bad("logLineRateLimit must be a number or \"unlimited\"");
    } else {
      const auto v = lim.get<std::int64_t>();
      if (v <= 0) Bad("logLineRateLimit must be positive");
      p.log_line_rate_limit = v;
    }
  }
  if (j.contains("clockOffsetMs")) p.clock_offset = MillisToMicros(j.at("clockOffsetMs").get<double>());
  p.bandwidth_bytes_per_ms = j.value("bandwidthBytesPerMs", 0.0);
  if (p.bandwidth_bytes_per_ms < 0) Bad("bandwidthBytesPerMs must be non-negative");
  p.memory_label = j.value("memory", std::string());
  return p;
}

}  // namespace

std::string DeploymentConfigToJson(const DeploymentConfig& cfg) {
  json j;
  j["benchmark"] = cfg.benchmark;
  json platforms = json::array();
  for (const auto& p : cfg.platforms) platforms.push_back(PlatformToJson(p));
  j["platforms"] = std::move(platforms);
  j["assignment"] = cfg.assignment;
  json bindings = json::object();
  for (const auto& [service, b] : cfg.service_bindings) {
    bindings[service] = {{"platform", b.platform}, {"latencyClass", b.latency_class}};
  }
  j["serviceBindings"] = std::move(bindings);
  j["tracing"] = {{"enabled", cfg.tracing_enabled}, {"overheadBytes", cfg.tracing_overhead_bytes}};
  if (cfg.compute_override) j["computeOverride"] = cfg.compute_override->ToString();
  return j.dump(2);
}

DeploymentConfig DeploymentConfigFromJson(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    Bad(e.what());
  }
  try {
    DeploymentConfig cfg;
    cfg.benchmark = j.value("benchmark", std::string());
    for (const auto& pj : j.at("platforms")) cfg.platforms.push_back(PlatformFromJson(pj));
    cfg.assignment = j.at("assignment").get<std::map<std::string, std::string>>();
    if (j.contains("serviceBindings")) {
      for (const auto& [service, b] : j.at("serviceBindings").items()) {
        cfg.service_bindings[service] = {b.at("platform").get<std::string>(), b.value("latencyClass", std::string())};
      }
    }
    if (j.contains("tracing")) {
      cfg.tracing_enabled = j.at("tracing").value("enabled", true);
      cfg.tracing_overhead_bytes = j.at("tracing").value("overheadBytes", std::int64_t{64});
    }
    if (j.contains("computeOverride")) cfg.compute_override = Dist(j.at("computeOverride"));
    return cfg;
  } catch (const json::exception& e) {
    Bad(e.what());
  }
}

DeploymentConfig LoadDeploymentConfigFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, path.string(), "cannot open deployment config");
  std::stringstream buf;
  buf << in.rdbuf();
  return DeploymentConfigFromJson(buf.str());
}

}  // namespace faasbench
