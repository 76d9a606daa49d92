// The four built-in benchmark applications. Function names and bodies are an
// encoding convention: counts and interactions follow the published
// descriptions, bodies are scripted compute delays plus calls and store
// operations. The README lists the per-function layout.

#include "faasbench/app_model.hpp"

namespace faasbench {

namespace {

constexpr const char* kStore = "kvstore";

BodyStep Glue(double median_ms = 0.5) {
  return BodyStep::Compute(DurationDistribution::LogNormalMs(median_ms, 0.3));
}

FunctionSpec Http(std::string name, StepList body, bool entry = false) {
  FunctionSpec f;
  f.name = std::move(name);
  f.trigger = TriggerKind::kHttpSync;
  f.entry_point = entry;
  f.body = std::move(body);
  return f;
}

FunctionSpec Event(std::string name, StepList body) {
  FunctionSpec f;
  f.name = std::move(name);
  f.trigger = TriggerKind::kEventAsync;
  f.body = std::move(body);
  return f;
}

using B = BodyStep;

ApplicationSpec WebShop() {
  ApplicationSpec app;
  app.name = "webshop";
  app.description =
      "Microservice web shop: 17 functions behind a single frontend entry point, state in one keyed store.";
  app.external_services = {kStore};

  FunctionSpec frontend = Http("frontend", {Glue(0.4), B::Return(256)}, /*entry=*/true);
  frontend.routes["home"] = {
      Glue(),
      B::Call("supportedCurrencies", 128),
      B::Parallel({{B::Call("listProducts", 128)}, {B::Call("getCart", 128)}, {B::Call("getAds", 128)}}),
      Glue(0.3),
      B::Return(4096),
  };
  frontend.routes["product"] = {
      Glue(),
      B::Call("getProduct", 128),
      B::Parallel({{B::Call("listRecommendations", 128)}, {B::Call("getAds", 128)}, {B::Call("convert", 64)}}),
      Glue(0.3),
      B::Return(2048),
  };
  frontend.routes["addCart"] = {
      Glue(),
      B::Call("addCartItem", 256),
      B::Call("getCart", 128),
      Glue(0.3),
      B::Return(1024),
  };
  frontend.routes["cart"] = {
      Glue(),
      B::Call("getCart", 128),
      B::Parallel({{B::Call("listRecommendations", 128)}, {B::Call("shipmentQuote", 256)}, {B::Call("convert", 64)}}),
      Glue(0.3),
      B::Return(2048),
  };
  frontend.routes["checkout"] = {Glue(), B::Call("checkout", 512), Glue(0.3), B::Return(1024)};
  frontend.routes["setCurrency"] = {Glue(), B::Call("setCurrency", 64), B::Return(128)};
  frontend.routes["login"] = {Glue(), B::Call("login", 128), B::Return(128)};
  app.functions.push_back(std::move(frontend));

  app.functions.push_back(Http("getCart", {Glue(), B::DbGet(kStore, "cart"), B::Return(512)}));
  app.functions.push_back(
      Http("addCartItem", {Glue(), B::DbGet(kStore, "cart"), B::DbSet(kStore, "cart", 512), B::Return(64)}));
  app.functions.push_back(Http("emptyCart", {Glue(), B::DbSet(kStore, "cart", 0), B::Return(64)}));
  app.functions.push_back(Http("listProducts", {Glue(0.8), B::Return(4096)}));
  app.functions.push_back(Http("getProduct", {Glue(), B::Return(512)}));
  app.functions.push_back(Http("supportedCurrencies", {Glue(0.3), B::Return(256)}));
  app.functions.push_back(Http("convert", {Glue(0.3), B::Return(64)}));
  app.functions.push_back(Http("checkout", {
                                               Glue(),
                                               B::Call("getCart", 128),
                                               B::Parallel({{B::Call("convert", 64)}, {B::Call("shipmentQuote", 256)}}),
                                               B::Call("payment", 256),
                                               B::Call("shipOrder", 256),
                                               B::Call("emptyCart", 64),
                                               B::Call("email", 512),
                                               Glue(0.4),
                                               B::Return(1024),
                                           }));
  app.functions.push_back(Http("payment", {Glue(0.6), B::Return(128)}));
  app.functions.push_back(Http("shipmentQuote", {Glue(0.4), B::Return(128)}));
  app.functions.push_back(Http("shipOrder", {Glue(0.4), B::Return(128)}));
  app.functions.push_back(Http("email", {Glue(0.7), B::Return(64)}));
  app.functions.push_back(Http("listRecommendations", {Glue(), B::Call("listProducts", 128), B::Return(512)}));
  app.functions.push_back(Http("getAds", {Glue(0.3), B::Return(512)}));
  app.functions.push_back(
      Http("login", {Glue(), B::DbGet(kStore, "session"), B::DbSet(kStore, "session", 256), B::Return(128)}));
  app.functions.push_back(Http("setCurrency", {Glue(0.3), B::DbSet(kStore, "currency", 16), B::Return(64)}));
  return app;
}

ApplicationSpec SmartCity() {
  ApplicationSpec app;
  app.name = "smartcity";
  app.description =
      "Smart traffic light: sensor filters and object recognition feed a movement plan that drives the light "
      "phase; emergencies override the phase. Nine functions, mixed sync and async calls.";
  app.external_services = {kStore};

  app.functions.push_back(
      Http("trafficSensorFilter", {Glue(0.8), B::Call("movementPlan", 256), B::Return(64)}, /*entry=*/true));
  // Image processing is replaced by a scripted compute delay.
  app.functions.push_back(Http("objectRecognition",
                               {
                                   B::Compute(DurationDistribution::LogNormalMs(120, 0.15)),
                                   B::Call("movementPlan", 512),
                                   B::Publish("trafficStatistics", 256),
                                   B::Return(64),
                               },
                               /*entry=*/true));
  app.functions.push_back(
      Http("weatherSensorFilter", {Glue(0.6), B::Call("roadCondition", 128), B::Return(64)}, /*entry=*/true));
  app.functions.push_back(Http("emergencyDetection",
                               {Glue(0.5), B::DbSet(kStore, "emergency", 16), B::Call("setLightPhase", 64),
                                B::Return(64)},
                               /*entry=*/true));
  app.functions.push_back(Http("movementPlan", {
                                                   B::Compute(DurationDistribution::LogNormalMs(2, 0.3)),
                                                   B::DbSet(kStore, "plan", 512),
                                                   B::Call("calculateLightPhase", 256),
                                                   B::Return(64),
                                               }));
  app.functions.push_back(Event("trafficStatistics", {Glue(1.0), B::DbSet(kStore, "statistics", 128)}));
  app.functions.push_back(Http("roadCondition", {Glue(0.5), B::DbSet(kStore, "road", 64), B::Return(16)}));
  app.functions.push_back(Http("calculateLightPhase", {
                                                          Glue(0.7),
                                                          B::Parallel({{B::DbGet(kStore, "road")},
                                                                       {B::DbGet(kStore, "emergency")}}),
                                                          B::Call("setLightPhase", 64),
                                                          B::Return(16),
                                                      }));
  app.functions.push_back(Http("setLightPhase", {Glue(0.3), B::DbSet(kStore, "phase", 16), B::Return(16)}));
  return app;
}

ApplicationSpec SmartFactory() {
  ApplicationSpec app;
  app.name = "smartfactory";
  app.description =
      "Couch factory: an order fans out into panel and cushion order events, each producing a production "
      "event and an accounting event; payment issues the invoice. Seven functions, all event-driven.";
  app.external_services = {kStore};

  // Couch models differ in the number of panels and cushions; each item
  // causes one order event and one production event (8 to 18 per couch).
  auto order_body = [](int panels, int cushions) {
    StepList steps = {Glue(0.8), B::DbSet(kStore, "order", 256)};
    for (int i = 0; i < panels; ++i) steps.push_back(B::Publish("orderPanel", 256));
    for (int i = 0; i < cushions; ++i) steps.push_back(B::Publish("orderCushion", 256));
    steps.push_back(B::Publish("payment", 128));
    steps.push_back(B::Return(64));
    return steps;
  };
  FunctionSpec supplies = Http("orderSupplies", order_body(3, 3), /*entry=*/true);
  supplies.routes["small"] = order_body(2, 2);
  supplies.routes["medium"] = order_body(3, 3);
  supplies.routes["large"] = order_body(3, 6);
  app.functions.push_back(std::move(supplies));

  app.functions.push_back(
      Event("orderPanel", {Glue(0.6), B::DbSet(kStore, "panelOrder", 128), B::Publish("producePanel", 256)}));
  app.functions.push_back(
      Event("orderCushion", {Glue(0.6), B::DbSet(kStore, "cushionOrder", 128), B::Publish("produceCushion", 256)}));
  app.functions.push_back(Event("producePanel", {B::Compute(DurationDistribution::LogNormalMs(25, 0.2)),
                                                 B::Publish("billing", 128)}));
  app.functions.push_back(Event("produceCushion", {B::Compute(DurationDistribution::LogNormalMs(20, 0.2)),
                                                   B::Publish("billing", 128)}));
  app.functions.push_back(
      Event("billing", {Glue(0.5), B::DbGet(kStore, "ledger"), B::DbSet(kStore, "ledger", 256)}));
  app.functions.push_back(
      Event("payment", {Glue(0.8), B::DbGet(kStore, "ledger"), B::DbSet(kStore, "invoice", 512)}));
  return app;
}

ApplicationSpec Streaming() {
  ApplicationSpec app;
  app.name = "streaming";
  app.description =
      "Video streaming backend: device registration, authentication, video and metadata functions. A long "
      "outage followed by a reconnect burst provokes cold starts. Seven functions.";
  app.external_services = {kStore};

  app.functions.push_back(
      Http("registerUser", {Glue(0.8), B::DbSet(kStore, "user", 256), B::Return(64)}, /*entry=*/true));
  app.functions.push_back(Http("registerDevice",
                               {Glue(0.6), B::Call("authenticate", 128), B::DbSet(kStore, "device", 128),
                                B::Return(64)},
                               /*entry=*/true));
  // authenticate and updateMetadata form the reconnect burst; both are
  // leaves with one store access.
  app.functions.push_back(
      Http("authenticate", {Glue(0.6), B::DbGet(kStore, "user"), B::Return(64)}, /*entry=*/true));
  app.functions.push_back(Http("addVideo",
                               {Glue(1.0), B::Call("authenticate", 128), B::DbSet(kStore, "video", 1024),
                                B::Return(64)},
                               /*entry=*/true));
  app.functions.push_back(Http("requestVideo",
                               {Glue(0.8), B::Call("authenticate", 128), B::Call("getMetadata", 128),
                                B::DbGet(kStore, "video"), B::Return(4096)},
                               /*entry=*/true));
  app.functions.push_back(
      Http("updateMetadata", {Glue(0.6), B::DbSet(kStore, "metadata", 128), B::Return(16)}, /*entry=*/true));
  app.functions.push_back(Http("getMetadata", {Glue(0.5), B::DbGet(kStore, "metadata"), B::Return(128)}));
  return app;
}

}  // namespace

std::vector<std::string> BuiltinBenchmarkNames() { return {"webshop", "smartcity", "smartfactory", "streaming"}; }

ApplicationSpec LoadBuiltin(std::string_view name) {
  if (name == "webshop") return WebShop();
  if (name == "smartcity") return SmartCity();
  if (name == "smartfactory") return SmartFactory();
  if (name == "streaming") return Streaming();
  throw Error(ErrorCode::kUnknownBenchmark, std::string(name));
}

}  // namespace faasbench
