#include <set>

#include "support.hpp"

namespace fbtest {
namespace {

LoadProfile SingleWorkflow(Phase phase) {
  LoadProfile lp;
  lp.name = "t";
  lp.workflows = {{"w", {WorkflowStep{"f", {}, 0, Ms(0)}}}};
  lp.phases = {std::move(phase)};
  return lp;
}

Phase PeriodicPhase(Micros duration, Micros interval) {
  Phase p;
  p.kind = PhaseKind::kPeriodic;
  p.name = "tick";
  p.duration = duration;
  p.entries = {{"w", interval, std::nullopt}};
  return p;
}

TEST(BuiltinProfile, WebshopIs18000Over15Minutes) {
  const LoadProfile lp = BuiltinProfile("webshop");
  ASSERT_EQ(lp.phases.size(), 1u);
  EXPECT_EQ(lp.phases[0].kind, PhaseKind::kConstantRate);
  EXPECT_EQ(lp.phases[0].duration, 900 * kMicrosPerSecond);
  EXPECT_DOUBLE_EQ(lp.phases[0].rate * 900, 18000.0);
  EXPECT_EQ(lp.phases[0].mix.size(), 4u);
}

TEST(BuiltinProfile, SmartcityPeriods) {
  const LoadProfile lp = BuiltinProfile("smartcity");
  std::map<std::string, Micros> interval;
  for (const auto& e : lp.phases.at(0).entries) interval[e.workflow] = e.interval;
  EXPECT_EQ(interval.at("traffic"), 2 * kMicrosPerSecond);
  EXPECT_EQ(interval.at("image"), 2 * kMicrosPerSecond);
  EXPECT_EQ(interval.at("weather"), 20 * kMicrosPerSecond);
  EXPECT_EQ(interval.at("emergency"), 120 * kMicrosPerSecond);
  const Workflow* em = lp.FindWorkflow("emergency");
  ASSERT_NE(em, nullptr);
  EXPECT_EQ(em->steps.at(0).think, Ms(5000));
}

TEST(BuiltinProfile, StreamingPhases) {
  const LoadProfile lp = BuiltinProfile("streaming");
  std::vector<PhaseKind> kinds;
  for (const auto& p : lp.phases) kinds.push_back(p.kind);
  EXPECT_EQ(kinds, (std::vector<PhaseKind>{PhaseKind::kBurst, PhaseKind::kConstantRate, PhaseKind::kPause,
                                           PhaseKind::kBurst}));
  EXPECT_EQ(lp.phases[1].duration, 300 * kMicrosPerSecond);
  EXPECT_NEAR(lp.phases[1].rate * 300, 500.0, 1e-9);
  EXPECT_EQ(lp.phases[2].duration, 1200 * kMicrosPerSecond);
  EXPECT_EQ(lp.phases[3].total_flows, 1500);
  EXPECT_EQ(lp.phases[3].duration, 300 * kMicrosPerSecond);
}

TEST(BuiltinProfile, AllValidateAgainstTheirApps) {
  for (const auto& name : BuiltinBenchmarkNames()) {
    EXPECT_NO_THROW(ValidateProfile(BuiltinProfile(name), LoadBuiltin(name))) << name;
  }
}

TEST(Schedule, ConstantRateCountWithinThreePercent) {
  const LoadProfile lp = BuiltinProfile("webshop");
  for (std::uint64_t seed : {1u, 7u, 123u}) {
    const LoadSchedule s = ScheduleProfile(lp, seed);
    EXPECT_NEAR(static_cast<double>(s.arrivals.size()), 18000.0, 540.0);
    for (const auto& a : s.arrivals) {
      ASSERT_GE(a.at, 0);
      ASSERT_LT(a.at, 900 * kMicrosPerSecond);
    }
    EXPECT_TRUE(std::is_sorted(s.arrivals.begin(), s.arrivals.end(),
                               [](const Arrival& x, const Arrival& y) { return x.at < y.at; }));
  }
}

// Kolmogorov-Smirnov distance of arrival times from the uniform CDF over
// the phase. The 1% critical value for n = 18000 is 1.63 / sqrt(n).
TEST(Schedule, ConstantRateArrivalsAreUniform) {
  const LoadSchedule s = ScheduleProfile(BuiltinProfile("webshop"), 5);
  const double n = static_cast<double>(s.arrivals.size());
  const double span = 900.0 * kMicrosPerSecond;
  double d = 0;
  for (std::size_t i = 0; i < s.arrivals.size(); ++i) {
    const double f = s.arrivals[i].at / span;
    d = std::max({d, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
  }
  EXPECT_LT(d, 1.63 / std::sqrt(n));
}

TEST(Schedule, MixProportions) {
  const LoadSchedule s = ScheduleProfile(BuiltinProfile("webshop"), 3);
  std::map<std::size_t, int> counts;
  for (const auto& a : s.arrivals) ++counts[a.workflow];
  for (const auto& [wf, c] : counts) EXPECT_NEAR(c / static_cast<double>(s.arrivals.size()), 0.25, 0.02);
}

TEST(Schedule, PeriodicExactTimes) {
  const LoadSchedule s = ScheduleProfile(SingleWorkflow(PeriodicPhase(60 * kMicrosPerSecond, 2 * kMicrosPerSecond)), 1);
  ASSERT_EQ(s.arrivals.size(), 30u);
  for (std::size_t i = 0; i < 30; ++i) EXPECT_EQ(s.arrivals[i].at, static_cast<Micros>(i + 1) * 2 * kMicrosPerSecond);
}

TEST(Schedule, PauseHasNoArrivals) {
  const LoadProfile lp = BuiltinProfile("streaming");
  const LoadSchedule s = ScheduleProfile(lp, 9);
  const PhaseWindow& pause = s.phases.at(2);
  EXPECT_EQ(pause.kind, PhaseKind::kPause);
  for (const auto& a : s.arrivals) EXPECT_FALSE(a.at >= pause.start && a.at < pause.end) << a.at;
  EXPECT_EQ(s.arrivals.size(), 50u + 500u + 1500u);
}

TEST(Schedule, ScaleDurations) {
  LoadProfile lp = BuiltinProfile("streaming");
  lp.scale_factor = 0.1;
  lp.scale_durations = true;
  const LoadSchedule s = ScheduleProfile(lp, 9);
  EXPECT_EQ(s.phases.at(2).end - s.phases.at(2).start, 120 * kMicrosPerSecond);
  std::map<std::size_t, int> per_phase;
  for (const auto& a : s.arrivals) ++per_phase[a.phase];
  EXPECT_EQ(per_phase[0], 5);
  EXPECT_EQ(per_phase[1], 50);
  EXPECT_EQ(per_phase[2], 0);
  EXPECT_EQ(per_phase[3], 150);
}

TEST(Schedule, ScaleRatesKeepsDuration) {
  LoadProfile lp = BuiltinProfile("smartcity");
  lp.scale_factor = 0.5;
  const LoadSchedule s = ScheduleProfile(lp, 1);
  EXPECT_EQ(s.phases.at(0).end, 900 * kMicrosPerSecond);
  // Intervals double: 225 + 225 + 22 + 3.
  EXPECT_EQ(s.arrivals.size(), 225u + 225u + 22u + 3u);
}

TEST(Schedule, Deterministic) {
  const LoadProfile lp = BuiltinProfile("webshop");
  const LoadSchedule a = ScheduleProfile(lp, 42), b = ScheduleProfile(lp, 42);
  EXPECT_EQ(a.arrivals, b.arrivals);
}

TEST(ProfileJson, RoundTripAndValidation) {
  for (const auto& name : BuiltinBenchmarkNames()) {
    const LoadProfile lp = BuiltinProfile(name);
    EXPECT_EQ(LoadProfileFromJson(LoadProfileToJson(lp)), lp) << name;
  }
  LoadProfile bad = BuiltinProfile("webshop");
  bad.phases[0].mix[0].weight = 0.5;
  EXPECT_THROW(ValidateProfile(bad), Error);
  bad = BuiltinProfile("webshop");
  bad.scale_factor = 0;
  EXPECT_THROW(ValidateProfile(bad), Error);
  bad = BuiltinProfile("webshop");
  bad.workflows[0].steps[0].entry = "getCart";
  EXPECT_THROW(ValidateProfile(bad, LoadBuiltin("webshop")), Error);
  bad = BuiltinProfile("webshop");
  bad.workflows[0].steps[0].route = "nosuchpage";
  EXPECT_THROW(ValidateProfile(bad, LoadBuiltin("webshop")), Error);
}

struct OneFunction {
  ApplicationSpec app;
  DeploymentConfig cfg;
  OneFunction() {
    app.name = "one";
    app.functions = {Fn("f", {Work(1), BodyStep::Return(1)}, true)};
    cfg.benchmark = "one";
    cfg.platforms = {ConstPlatform("p", 0, 5)};
    cfg.assignment = {{"f", "p"}};
  }
};

TEST(Execute, OneStepOneRootRecord) {
  OneFunction one;
  Harness h(one.app, one.cfg);
  LoadProfile lp = SingleWorkflow(PeriodicPhase(kMicrosPerSecond, kMicrosPerSecond));
  const LoadSchedule s = ScheduleProfile(lp, 1);
  ASSERT_EQ(s.arrivals.size(), 1u);
  Execute(s, lp, *h.world);
  h.world->RunUntilIdle();
  const auto roots = h.Records(std::string(kLoadgenPlatform));
  ASSERT_EQ(roots.size(), 1u);
  EXPECT_EQ(roots[0].kind, RecordKind::kOutgoingCall);
  EXPECT_EQ(roots[0].function_name, "w");
  for (const auto& r : h.Records("p")) EXPECT_EQ(r.context_id, roots[0].context_id);
}

TEST(Execute, EveryContextHasExactlyOneRoot) {
  const Recipe r = LoadRecipe("exp1-single-cloud");
  LoadProfile lp = r.profile;
  lp.scale_factor = 0.01;
  const auto sim = Simulate(LoadBuiltin("webshop"), r.config, lp, 3);
  std::map<Id128, int> roots;
  std::set<Id128> contexts;
  for (const auto& line : sim.raw_lines) {
    auto rec = ParseRecordLine(line);
    if (!rec) continue;
    contexts.insert(rec->context_id);
    if (rec->platform_id == kLoadgenPlatform) ++roots[rec->context_id];
  }
  EXPECT_EQ(static_cast<std::int64_t>(contexts.size()), sim.stats.root_calls);
  for (const auto& ctx : contexts) EXPECT_EQ(roots[ctx], 1);
}

TEST(Execute, UnknownEntry) {
  OneFunction one;
  Harness h(one.app, one.cfg);
  LoadProfile lp = SingleWorkflow(PeriodicPhase(kMicrosPerSecond, kMicrosPerSecond));
  lp.workflows[0].steps[0].entry = "ghost";
  EXPECT_THROW(Execute(ScheduleProfile(lp, 1), lp, *h.world), Error);
}

}  // namespace
}  // namespace fbtest
