// Copyright 2026 The Scalepool Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <atomic>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "gtest/gtest.h"
#include "json.hpp"
#include "scalepool/common/errors.h"
#include "scalepool/harness/clock.h"
#include "scalepool/harness/experiment.h"
#include "scalepool/harness/scenario.h"
#include "scalepool/harness/trace.h"
#include "scalepool_testing.h"

namespace scalepool::harness {
namespace {

using nlohmann::json;
using std::chrono::milliseconds;
using std::chrono::seconds;

ScenarioConfig baseline_config() { return load_scenario(testing::source_path("scenarios/baseline.json")); }

ExperimentResult run_config(const ScenarioConfig& config) {
  Experiment e(config, load_plan(config));
  return e.run();
}

// Short scenario used by several tests; `patch` is merged over the base.
ScenarioConfig small_config(const json& patch = json::object()) {
  json doc = {
      {"mode", "simulated"},
      {"seed", 7},
      {"profile",
       {{"users", 20}, {"hatch_rate", 5}, {"stream_hold_ms", {4000, 6000}}, {"think_time_ms", 500},
        {"run_duration_ms", 30000}}},
      {"descriptors", {{"vnfds", {"vsp.vnfd.json"}}, {"nsd", "ugc.nsd.json"}}},
      {"overrides", {{"sync_period_ms", 5000}, {"stabilization_ms", 15000}, {"capacity", 4}}},
      {"metrics", {{"rate_window_ms", 10000}, {"scrape_interval_ms", 1000}}},
  };
  doc.merge_patch(patch);
  ScenarioConfig c = parse_scenario(doc.dump(), testing::source_path("descriptors"));
  c.validate();
  return c;
}

TEST(LogicalClockTest, RunsInTimeThenSequenceOrder) {
  LogicalClock clock;
  std::vector<int> order;
  clock.schedule_at(at_ms(20), [&] { order.push_back(3); });
  clock.schedule_at(at_ms(10), [&] { order.push_back(1); });
  clock.schedule_at(at_ms(10), [&] { order.push_back(2); });
  clock.schedule_at(at_ms(30), [&] {
    order.push_back(4);
    clock.schedule_at(at_ms(5), [&] { order.push_back(5); });  // in the past
  });
  clock.run_all();
  EXPECT_EQ(order, (std::vector{1, 2, 3, 4, 5}));
  EXPECT_EQ(clock.now(), at_ms(30));
  EXPECT_EQ(clock.executed(), 5u);
}

TEST(LogicalClockTest, RunUntilStopsAndAdvances) {
  LogicalClock clock;
  int ran = 0;
  clock.schedule_at(at_ms(100), [&] { ++ran; });
  clock.schedule_at(at_ms(200), [&] { ++ran; });
  clock.run_until(at_ms(150));
  EXPECT_EQ(ran, 1);
  EXPECT_EQ(clock.now(), at_ms(150));
  EXPECT_EQ(clock.pending(), 1u);
  clock.schedule_after(milliseconds(10), [&] { ++ran; });
  EXPECT_TRUE(clock.run_next());
  EXPECT_EQ(clock.now(), at_ms(160));
  clock.run_all();
  EXPECT_EQ(ran, 3);
  EXPECT_FALSE(clock.run_next());
}

TEST(LogicalClockPropertyTest, NowNeverDecreases) {
  Rng rng(3);
  LogicalClock clock;
  Timestamp last{};
  int remaining = 5000;
  std::function<void()> task = [&] {
    ASSERT_GE(clock.now(), last);
    last = clock.now();
    if (--remaining > 0) {
      for (int k = 0; k < 2; ++k) {
        clock.schedule_at(at_ms(static_cast<int64_t>(rng.below(100000))), task);
      }
    }
  };
  clock.schedule_at(at_ms(0), task);
  while (remaining > 0 && clock.run_next()) {
  }
  SUCCEED();
}

TEST(RealtimeLoopTest, CallRunsOnLoopThread) {
  RealtimeLoop loop;
  loop.start();
  EXPECT_TRUE(loop.call([&] { return loop.on_loop_thread(); }));
  std::atomic<int> hits{0};
  loop.schedule_after(milliseconds(20), [&] { ++hits; });
  std::this_thread::sleep_for(milliseconds(100));
  EXPECT_EQ(hits.load(), 1);
  loop.stop();
}

TEST(TraceRecorderTest, MergesRowsAtSameInstant) {
  TraceRecorder trace;
  trace.record({at_ms(1000), 1, 1, std::nullopt, 0, 0, 0, "tick"});
  trace.record({at_ms(1000), 1, 3, metrics::MilliValue(2913), 5, 2, 7, "scale_to:3"});
  ASSERT_EQ(trace.rows().size(), 1u);
  EXPECT_EQ(trace.rows()[0].replicas_desired, 3);
  EXPECT_EQ(trace.rows()[0].event, "tick;scale_to:3");
  EXPECT_TRUE(has_event(trace.rows()[0], "scale_to:3"));
  EXPECT_FALSE(has_event(trace.rows()[0], "scale_to"));
}

TEST(TraceRecorderTest, RejectsBackwardsTimeAndCommas) {
  TraceRecorder trace;
  trace.record({at_ms(1000), 1, 1, std::nullopt, 0, 0, 0, "tick"});
  EXPECT_THROW(trace.record({at_ms(999), 1, 1, std::nullopt, 0, 0, 0, "tick"}), ContractViolation);
  EXPECT_THROW(trace.record({at_ms(2000), 1, 1, std::nullopt, 0, 0, 0, "a,b"}), ContractViolation);
}

TEST(TraceRecorderTest, CsvFormat) {
  TraceRecorder trace;
  trace.record({at_ms(5000), 1, 1, std::nullopt, 0, 0, 0, "load_start"});
  trace.record({at_ms(20250), 1, 3, metrics::MilliValue(2913), 40, 12, 9, "tick;scale_to:3"});
  EXPECT_EQ(trace.to_csv(at_ms(5000)),
            std::string(kTraceHeader) +
                "\n"
                "0.000,1,1,,0,0,0,load_start\n"
                "15.250,1,3,2913,40,12,9,tick;scale_to:3\n");
}

TEST(ControllerTest, UnavailableUntilStarted) {
  Controller c;
  EXPECT_FALSE(c.running());
  EXPECT_THROW(c.endpoint(), Unavailable);
  c.start("192.168.39.55:30000");
  EXPECT_EQ(c.endpoint(), "192.168.39.55:30000");
  EXPECT_EQ(c.endpoint(), c.endpoint());
  c.stop();
  EXPECT_THROW(c.endpoint(), Unavailable);
}

TEST(ScenarioTest, BaselineScenarioFile) {
  const ScenarioConfig c = baseline_config();
  EXPECT_EQ(c.mode, Mode::kSimulated);
  EXPECT_EQ(c.seed, 20221024u);
  EXPECT_EQ(c.profile.target_users, 100);
  EXPECT_EQ(c.profile.hatch_rate, 10.0);
  EXPECT_EQ(c.profile.stream_hold_min, seconds(9));
  EXPECT_EQ(c.profile.stream_hold_max, seconds(11));
  EXPECT_EQ(c.overrides.stabilization, seconds(60));
  EXPECT_TRUE(std::filesystem::exists(c.vnfds[0].path));
  const auto plan = load_plan(c);
  EXPECT_EQ(plan.hpas[0].scale_down_stabilization, seconds(60));
  EXPECT_EQ(plan.hpas[0].tolerance, metrics::MilliValue(100));
  EXPECT_EQ(plan.deployments[0].initial_replicas, 1);
}

TEST(ScenarioTest, DefaultsAndInlineDescriptors) {
  const json vnfd = json::parse(harness::read_file(testing::source_path("descriptors/vsp.vnfd.json")));
  const json nsd = json::parse(harness::read_file(testing::source_path("descriptors/ugc.nsd.json")));
  const json doc = {{"seed", 1}, {"descriptors", {{"vnfds", {vnfd}}, {"nsd", nsd}}}};
  const ScenarioConfig c = parse_scenario(doc.dump(), "/nowhere");
  EXPECT_EQ(c.mode, Mode::kSimulated);
  EXPECT_EQ(c.rate_window, seconds(30));
  EXPECT_EQ(c.profile.think_time, seconds(1));
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(load_plan(c).deployments[0].name, "vsp");
}

TEST(ScenarioTest, Errors) {
  EXPECT_THROW(parse_scenario("[]", "."), ScenarioError);
  EXPECT_THROW(parse_scenario(R"({"seed": 1})", "."), ScenarioError);
  EXPECT_THROW(small_config({{"mode", "turbo"}}), ScenarioError);
  EXPECT_THROW(small_config({{"overrides", {{"tolerance", "abc"}}}}), ScenarioError);
  EXPECT_THROW(small_config({{"profile", {{"users", "many"}}}}), ScenarioError);
  EXPECT_THROW(small_config({{"profile", {{"users", 0}}}}), ScenarioError);
  ScenarioConfig no_seed = small_config();
  no_seed.seed.reset();
  EXPECT_THROW(no_seed.validate(), ScenarioError);
  no_seed.mode = Mode::kRealTime;
  EXPECT_NO_THROW(no_seed.validate());
}

TEST(ScenarioTest, ControllerPort) {
  EXPECT_EQ(small_config().controller_port, 0);
  EXPECT_EQ(small_config({{"controller_port", 30081}}).controller_port, 30081);
  EXPECT_THROW(small_config({{"controller_port", 70000}}), ScenarioError);
  EXPECT_THROW(small_config({{"controller_port", -1}}), ScenarioError);
  EXPECT_THROW(small_config({{"controller_port", "30081"}}), ScenarioError);
}

TEST(ScenarioTest, OverridesValidated) {
  EXPECT_THROW(load_plan(small_config({{"overrides", {{"min_replicas", 5}, {"max_replicas", 2}}}})),
               ScenarioError);
  EXPECT_THROW(load_plan(small_config({{"overrides", {{"capacity", 0}}}})), ScenarioError);
  ScenarioConfig c = small_config({{"overrides", {{"scheduler", "lc"}, {"min_replicas", 2}}}});
  const auto plan = load_plan(c);
  EXPECT_EQ(plan.virtual_service.scheduler, balancer::Scheduler::kLeastConnection);
  EXPECT_EQ(plan.deployments[0].initial_replicas, 2);
  EXPECT_EQ(plan.deployments[0].pod.capacity, 4);
}

TEST(ScenarioTest, MissingDescriptorFile) {
  ScenarioConfig c = small_config();
  c.vnfds[0].path = "/does/not/exist.vnfd.json";
  EXPECT_THROW(load_plan(c), ScenarioError);
}

TEST(ScenarioTest, EchoIsValidJson) {
  const json echo = json::parse(scenario_to_json(baseline_config()));
  EXPECT_EQ(echo["seed"], 20221024u);
  EXPECT_EQ(echo["overrides"]["tolerance"], "100m");
}

TEST(ExperimentTest, BaselineScenarioScalesOutAndBack) {
  const ExperimentResult r = run_config(baseline_config());
  EXPECT_TRUE(r.audits_passed());
  EXPECT_EQ(r.max_replicas_reached, 10);
  EXPECT_GT(r.denied_total, 0u);
  ASSERT_TRUE(r.settle_time.has_value());
  EXPECT_LE(*r.settle_time, seconds(60) + 2 * seconds(15));
  EXPECT_EQ(r.admitted_total + r.denied_total + r.connection_errors, r.records.size());
  ASSERT_FALSE(r.trace.empty());
  EXPECT_EQ(r.trace.rows().back().replicas_running, 1);
  for (const auto& row : r.trace.rows()) {
    ASSERT_GE(row.replicas_running, 1);
    ASSERT_LE(row.replicas_running, 10);
  }
}

TEST(ExperimentTest, DeterministicOutputs) {
  const ScenarioConfig c = small_config();
  const ExperimentResult a = run_config(c);
  const ExperimentResult b = run_config(c);
  EXPECT_EQ(a.trace.to_csv(a.load_start), b.trace.to_csv(b.load_start));
  EXPECT_EQ(loadgen::to_csv(a.load_stats), loadgen::to_csv(b.load_stats));
  EXPECT_EQ(a.event_log, b.event_log);
}

TEST(ExperimentTest, SeedChangesTheRun) {
  const ExperimentResult a = run_config(small_config());
  const ExperimentResult b = run_config(small_config({{"seed", 8}}));
  EXPECT_NE(a.trace.to_csv(a.load_start), b.trace.to_csv(b.load_start));
}

TEST(ExperimentTest, ZeroLoadStaysFlat) {
  // The first user would hatch after 100 s, past the end of the load phase.
  const ExperimentResult r = run_config(small_config({{"profile", {{"hatch_rate", 0.01}}}}));
  EXPECT_TRUE(r.audits_passed());
  EXPECT_TRUE(r.records.empty());
  EXPECT_EQ(r.denied_total, 0u);
  EXPECT_EQ(r.max_replicas_reached, 1);
  for (const auto& row : r.trace.rows()) EXPECT_EQ(row.replicas_running, 1);
}

TEST(ExperimentTest, EveryAuditReported) {
  const ExperimentResult r = run_config(small_config());
  std::vector<std::string> names;
  for (const auto& a : r.audits) {
    names.push_back(a.name);
    EXPECT_TRUE(a.passed) << a.name << ": " << a.detail;
  }
  EXPECT_EQ(names, (std::vector<std::string>{"replicas_within_bounds", "stream_conservation",
                                             "request_accounting", "no_forced_terminations",
                                             "pod_phase_transitions", "no_leaked_streams",
                                             "trace_monotonic"}));
}

TEST(ExperimentTest, AllSchedulersPassAudits) {
  for (const char* s : {"rr", "wrr", "lc"}) {
    const ExperimentResult r = run_config(small_config({{"overrides", {{"scheduler", s}}}}));
    EXPECT_TRUE(r.audits_passed()) << s;
    EXPECT_GT(r.admitted_total, 0u) << s;
  }
}

TEST(ExperimentTest, ActiveStreamsMetricAlsoScales) {
  const ExperimentResult r = run_config(
      small_config({{"overrides", {{"metric", "vsp_active_streams"}, {"target", "2"}}}}));
  EXPECT_TRUE(r.audits_passed());
  EXPECT_GT(r.max_replicas_reached, 1);
}

TEST(ExperimentTest, InspectMidRun) {
  const ScenarioConfig c = baseline_config();
  Experiment e(c, load_plan(c));
  EXPECT_THROW(e.controller().endpoint(), Unavailable);
  e.run_until(at_ms(60000));
  EXPECT_EQ(e.now(), at_ms(60000));
  EXPECT_EQ(e.controller().endpoint(), "192.168.39.55:30000");
  const std::string table = e.render_table();
  EXPECT_EQ(table.rfind("TCP 192.168.39.55:30000 rr\n", 0), 0u);
  EXPECT_EQ(static_cast<int>(std::count(table.begin(), table.end(), '\n')),
            1 + static_cast<int>(e.virtual_service().servers().size()));
  const std::string status = e.render_hpa_status();
  EXPECT_EQ(status.rfind(std::string(autoscaler::kStatusHeader) + "\n", 0), 0u);
  EXPECT_NE(status.find("vsp\tDeployment/vsp\t"), std::string::npos);
  EXPECT_NE(status.find("/1\t1\t10\t10\n"), std::string::npos);
}

TEST(ExperimentTest, WritesOutputs) {
  const ScenarioConfig c = small_config();
  const ExperimentResult r = run_config(c);
  const auto dir = std::filesystem::temp_directory_path() / "scalepool_harness_test_out";
  std::filesystem::remove_all(dir);
  write_outputs(r, c, dir);
  for (const char* f : {"trace.csv", "loadstats.csv", "report.json", "events.jsonl"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  const std::string trace = read_file(dir / "trace.csv");
  EXPECT_EQ(trace.substr(0, kTraceHeader.size()), kTraceHeader);
  const json report = json::parse(read_file(dir / "report.json"));
  EXPECT_EQ(report["audits"], "pass");
  EXPECT_EQ(report["max_replicas_reached"], r.max_replicas_reached);
  EXPECT_EQ(report["scheduler"], "rr");
  EXPECT_EQ(report["totals"]["denied"], r.denied_total);
  for (const auto& line : r.event_log) EXPECT_TRUE(json::accept(line)) << line;
  std::filesystem::remove_all(dir);
}

// Wall-clock run over loopback HTTP with short timings.
TEST(RealtimeExperimentTest, LoopbackSmoke) {
  ScenarioConfig c = small_config({{"mode", "realtime"},
                                   {"profile",
                                    {{"users", 6},
                                     {"hatch_rate", 20},
                                     {"stream_hold_ms", {150, 250}},
                                     {"think_time_ms", 50},
                                     {"run_duration_ms", 2000}}},
                                   {"overrides",
                                    {{"sync_period_ms", 250},
                                     {"stabilization_ms", 500},
                                     {"capacity", 2}}},
                                   {"metrics", {{"rate_window_ms", 1000}, {"scrape_interval_ms", 100}}}});
  const ExperimentResult r = run_config(c);
  for (const auto& a : r.audits) EXPECT_TRUE(a.passed) << a.name << ": " << a.detail;
  EXPECT_GT(r.admitted_total, 0u);
  EXPECT_EQ(r.mode, Mode::kRealTime);
  EXPECT_GE(r.max_replicas_reached, 1);
}

}  // namespace
}  // namespace scalepool::harness
