#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "support.hpp"

namespace fbtest {
namespace {

bool HasViolation(const ValidationReport& r, ViolationKind kind, const std::string& detail) {
  return std::any_of(r.violations.begin(), r.violations.end(),
                     [&](const Violation& v) { return v.kind == kind && v.detail == detail; });
}

TEST(Builtins, WebshopHasSeventeenFunctionsAndOneEntry) {
  const ApplicationSpec app = LoadBuiltin("webshop");
  EXPECT_EQ(app.functions.size(), 17u);
  std::vector<std::string> entries;
  for (const auto& f : app.functions) {
    if (f.entry_point) entries.push_back(f.name);
  }
  EXPECT_EQ(entries, std::vector<std::string>{"frontend"});
  EXPECT_EQ(app.external_services.size(), 1u);
}

TEST(Builtins, SmartfactoryEdgesAreAllPublishes) {
  const ApplicationSpec app = LoadBuiltin("smartfactory");
  EXPECT_EQ(app.functions.size(), 7u);
  const CallGraph g = BuildCallGraph(app);
  ASSERT_FALSE(g.edges.empty());
  for (const auto& e : g.edges) EXPECT_EQ(e.mode, CallMode::kAsync) << e.caller << "->" << e.callee;
  auto has = [&](const std::string& a, const std::string& b) {
    return std::find(g.edges.begin(), g.edges.end(), CallEdge{a, b, CallMode::kAsync}) != g.edges.end();
  };
  EXPECT_TRUE(has("orderSupplies", "orderPanel"));
  EXPECT_TRUE(has("orderSupplies", "orderCushion"));
}

TEST(Builtins, SmartcityAndStreamingCounts) {
  EXPECT_EQ(LoadBuiltin("smartcity").functions.size(), 9u);
  EXPECT_EQ(LoadBuiltin("streaming").functions.size(), 7u);
}

TEST(Builtins, AllValidate) {
  for (const auto& name : BuiltinBenchmarkNames()) {
    const ValidationReport r = Validate(LoadBuiltin(name));
    EXPECT_TRUE(r.ok()) << name << ": " << r.ToString();
  }
}

TEST(Builtins, UnknownName) {
  try {
    LoadBuiltin("shop");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownBenchmark);
  }
}

// Breadth-first reachability written independently of Validate.
TEST(Builtins, WebshopEverythingReachableFromFrontend) {
  const ApplicationSpec app = LoadBuiltin("webshop");
  const CallGraph g = BuildCallGraph(app);
  std::set<std::string> seen{"frontend"};
  std::vector<std::string> frontier{"frontend"};
  while (!frontier.empty()) {
    const std::string cur = frontier.back();
    frontier.pop_back();
    for (const auto& e : g.edges) {
      if (e.caller == cur && seen.insert(e.callee).second) frontier.push_back(e.callee);
    }
  }
  for (const auto& f : app.functions) EXPECT_TRUE(seen.count(f.name)) << f.name;
}

TEST(Validate, DuplicateName) {
  ApplicationSpec app;
  app.name = "dup";
  app.functions = {Fn("frontend", {}, true), Fn("frontend", {})};
  EXPECT_TRUE(HasViolation(Validate(app), ViolationKind::kDuplicateName, "frontend"));
}

TEST(Validate, UnknownTarget) {
  ApplicationSpec app;
  app.name = "x";
  app.functions = {Fn("frontend", {BodyStep::Call("cartX")}, true)};
  EXPECT_TRUE(HasViolation(Validate(app), ViolationKind::kUnknownTarget, "cartX"));
}

TEST(Validate, KindMismatchAndReservedAndReturn) {
  ApplicationSpec app;
  app.name = "x";
  app.external_services = {"db"};
  app.functions = {
      Fn("a", {BodyStep::Return(1), BodyStep::Publish("b"), BodyStep::DbGet("nope", "k")}, true),
      Fn("b", {}),
      Fn("publisher.x", {}),
  };
  const ValidationReport r = Validate(app);
  EXPECT_TRUE(HasViolation(r, ViolationKind::kTargetKindMismatch, "b"));
  EXPECT_TRUE(HasViolation(r, ViolationKind::kReturnNotLast, "return"));
  EXPECT_TRUE(HasViolation(r, ViolationKind::kUnknownService, "nope"));
  EXPECT_TRUE(HasViolation(r, ViolationKind::kReservedName, "publisher.x"));
  EXPECT_TRUE(HasViolation(r, ViolationKind::kUnreachable, "publisher.x"));
}

TEST(Validate, NoEntryPoint) {
  ApplicationSpec app;
  app.name = "x";
  app.functions = {Fn("a", {})};
  EXPECT_TRUE(HasViolation(Validate(app), ViolationKind::kNoEntryPoint, "x"));
}

TEST(CallGraph, SingleFunction) {
  ApplicationSpec app;
  app.name = "one";
  app.functions = {Fn("a", {Work(1)}, true)};
  const CallGraph g = BuildCallGraph(app);
  EXPECT_EQ(g.nodes.size(), 1u);
  EXPECT_TRUE(g.edges.empty());
}

TEST(AppJson, RoundTripsBuiltins) {
  for (const auto& name : BuiltinBenchmarkNames()) {
    const ApplicationSpec app = LoadBuiltin(name);
    EXPECT_EQ(ApplicationFromJson(ApplicationToJson(app)), app) << name;
  }
}

TEST(AppJson, RejectsGarbage) {
  EXPECT_THROW(ApplicationFromJson("{not json"), Error);
}

TEST(Distribution, ParseAndPrint) {
  for (const char* text : {"constant(4)", "uniform(1, 2.5)", "lognormal(100, 0.3)", "exponential(7)",
                           "mix(0.25, constant(1), lognormal(3, 0.2))"}) {
    const auto d = DurationDistribution::Parse(text);
    EXPECT_EQ(d.ToString(), text);
    EXPECT_EQ(DurationDistribution::Parse(d.ToString()), d);
  }
  EXPECT_THROW(DurationDistribution::Parse("lognormal(1)"), Error);
  EXPECT_THROW(DurationDistribution::Parse("uniform(3, 1)"), Error);
  EXPECT_THROW(DurationDistribution::Parse("constant(-1)"), Error);
  EXPECT_THROW(DurationDistribution::Parse("gamma(1, 2)"), Error);
}

TEST(Distribution, ConstantIsExactMicroseconds) {
  Rng rng(3);
  EXPECT_EQ(DurationDistribution::Fixed(2.5).Sample(rng), 2500);
  EXPECT_EQ(DurationDistribution::FixedMicros(17).Sample(rng), 17);
}

TEST(Distribution, UniformStaysInRange) {
  Rng rng(5);
  const auto d = DurationDistribution::UniformMs(500, 1500);
  for (int i = 0; i < 10000; ++i) {
    const Micros v = d.Sample(rng);
    ASSERT_GE(v, 500000);
    ASSERT_LE(v, 1500000);
  }
}

// Sampling oracle: the empirical median of 1000 lognormal draws is within
// 10% of the configured median.
TEST(Distribution, LogNormalMedianRecovered) {
  for (std::uint64_t seed : {1u, 2u, 3u, 42u}) {
    Rng rng(seed);
    const auto d = DurationDistribution::LogNormalMs(100, 0.3);
    std::vector<Micros> v;
    for (int i = 0; i < 1000; ++i) v.push_back(d.Sample(rng));
    std::nth_element(v.begin(), v.begin() + 500, v.end());
    EXPECT_NEAR(static_cast<double>(v[500]), 100000.0, 10000.0) << "seed " << seed;
  }
}

// Moment check of the normal generator against the standard library.
TEST(Distribution, StandardNormalMoments) {
  Rng rng(11);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.StandardNormal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
}

TEST(Distribution, MixtureProportion) {
  Rng rng(9);
  const auto d = DurationDistribution::Mix(0.25, DurationDistribution::Fixed(1), DurationDistribution::Fixed(2));
  int first = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) first += d.Sample(rng) == 1000;
  EXPECT_NEAR(first / static_cast<double>(n), 0.25, 0.01);
}

TEST(Common, Id128HexRoundTrip) {
  IdSource ids(1);
  for (int i = 0; i < 100; ++i) {
    const Id128 id = ids.Next();
    const std::string hex = id.ToHex();
    EXPECT_EQ(hex.size(), 32u);
    EXPECT_EQ(Id128::FromHex(hex), id);
  }
  EXPECT_FALSE(Id128::FromHex("xyz").has_value());
  EXPECT_FALSE(Id128::FromHex(std::string(32, 'g')).has_value());
}

TEST(Common, DeriveSeedSeparatesStreams) {
  EXPECT_NE(DeriveSeed(1, "sim"), DeriveSeed(1, "ids"));
  EXPECT_NE(DeriveSeed(1, "sim"), DeriveSeed(2, "sim"));
  EXPECT_EQ(DeriveSeed(7, "loadgen"), DeriveSeed(7, "loadgen"));
}

}  // namespace
}  // namespace fbtest
