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

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "scalepool/common/errors.h"
#include "scalepool/loadgen/loadgen.h"

namespace scalepool::loadgen {
namespace {

using std::chrono::milliseconds;
using std::chrono::seconds;

// In-memory service with a fixed number of slots.
class FakeGateway : public ServiceGateway {
 public:
  explicit FakeGateway(int slots, Latency latency = Latency{0}) : slots_(slots), latency_(latency) {}

  std::optional<std::string> resolve_endpoint() override {
    ++resolves;
    if (!reachable) return std::nullopt;
    return "vs:1";
  }
  UploadReply upload(const std::string& endpoint, const std::string& stream_id) override {
    EXPECT_EQ(endpoint, "vs:1");
    if (static_cast<int>(open.size()) >= slots_) return {Outcome::kDenied, latency_};
    EXPECT_TRUE(open.insert(stream_id).second);
    return {Outcome::kAdmitted, latency_};
  }
  void release(const std::string&, const std::string& stream_id) override {
    EXPECT_EQ(open.erase(stream_id), 1u) << stream_id;
    ++releases;
  }

  void set_slots(int n) { slots_ = n; }

  std::set<std::string> open;
  bool reachable = true;
  int resolves = 0;
  int releases = 0;

 private:
  int slots_;
  Latency latency_;
};

// Drives one session until it finishes or `until` passes.
std::vector<RequestRecord> drive(UserSession& s, FakeGateway& gw, Timestamp start, Timestamp until) {
  std::vector<RequestRecord> records;
  std::optional<Timestamp> next = start;
  while (next && *next <= until) next = s.step(*next, gw, [&](const RequestRecord& r) { records.push_back(r); });
  return records;
}

LoadProfile fixed_profile(Duration hold, Duration think, Duration run) {
  LoadProfile p;
  p.stream_hold_min = p.stream_hold_max = hold;
  p.think_time = think;
  p.run_duration = run;
  return p;
}

TEST(LoadProfileTest, Validation) {
  LoadProfile p;
  EXPECT_NO_THROW(p.validate());
  p.target_users = 0;
  EXPECT_THROW(p.validate(), ContractViolation);
  p = LoadProfile{};
  p.hatch_rate = 0;
  EXPECT_THROW(p.validate(), ContractViolation);
  p = LoadProfile{};
  p.stream_hold_min = p.stream_hold_max = Duration::zero();
  EXPECT_THROW(p.validate(), ContractViolation);
  p = LoadProfile{};
  p.stream_hold_max = seconds(1);
  EXPECT_THROW(p.validate(), ContractViolation);
}

TEST(SpawnScheduleTest, Examples) {
  const LoadProfile p;  // 100 users at 10/s
  EXPECT_EQ(spawn_schedule(p, seconds(5)), 50);
  EXPECT_EQ(spawn_schedule(p, seconds(10)), 100);
  EXPECT_EQ(spawn_schedule(p, seconds(100)), 100);
  EXPECT_EQ(spawn_schedule(p, Duration::zero()), 0);
  EXPECT_EQ(spawn_schedule(p, milliseconds(99)), 0);
  EXPECT_EQ(spawn_schedule(p, milliseconds(100)), 1);
}

TEST(SpawnScheduleTest, RampIsMonotoneAndCapped) {
  for (double rate : {0.3, 1.0, 7.0, 10.0, 33.3}) {
    LoadProfile p;
    p.hatch_rate = rate;
    int prev = 0;
    for (int64_t ms = 0; ms <= 400000; ms += 37) {
      const int n = spawn_schedule(p, Duration(ms));
      ASSERT_GE(n, prev);
      ASSERT_LE(n, p.target_users);
      prev = n;
    }
  }
}

TEST(SpawnOffsetTest, FirstInstantUserIsActive) {
  for (double rate : {0.3, 3.0, 10.0, 33.3}) {
    LoadProfile p;
    p.hatch_rate = rate;
    for (int i = 0; i < p.target_users; ++i) {
      const Duration at = spawn_offset(p, i);
      ASSERT_GT(spawn_schedule(p, at), i);
      ASSERT_LE(spawn_schedule(p, at - milliseconds(1)), i);
    }
  }
  EXPECT_EQ(spawn_offset(LoadProfile{}, 0), milliseconds(100));
  EXPECT_EQ(spawn_offset(LoadProfile{}, 99), seconds(10));
}

TEST(UserSessionTest, TwoStreamsInTwentyTwoSeconds) {
  const LoadProfile p = fixed_profile(seconds(10), seconds(1), seconds(22));
  FakeGateway gw(10);
  UserSession s(0, p, Rng(1), at_ms(22000));
  const auto records = drive(s, gw, at_ms(0), at_ms(100000));
  EXPECT_TRUE(s.done());
  EXPECT_EQ(s.completed_streams(), 2);
  EXPECT_EQ(records.size(), 2u);
  EXPECT_TRUE(gw.open.empty());
}

TEST(UserSessionTest, DeniedThenAdmittedAfterScaleOut) {
  const LoadProfile p = fixed_profile(seconds(10), seconds(1), seconds(60));
  FakeGateway gw(0);
  UserSession s(3, p, Rng(1), at_ms(60000));
  std::vector<RequestRecord> records;
  const RecordSink sink = [&](const RequestRecord& r) { records.push_back(r); };
  std::optional<Timestamp> next = at_ms(0);
  for (int i = 0; i < 3; ++i) next = s.step(*next, gw, sink);
  EXPECT_EQ(*next, at_ms(3000));
  gw.set_slots(1);
  s.step(*next, gw, sink);
  ASSERT_EQ(records.size(), 4u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(records[static_cast<size_t>(i)].outcome, Outcome::kDenied);
  EXPECT_EQ(records[3].outcome, Outcome::kAdmitted);
  EXPECT_EQ(records[3].stream_id, "u3-s3");
  EXPECT_TRUE(s.holding());
}

TEST(UserSessionTest, UnreachableControllerIsConnectionError) {
  const LoadProfile p = fixed_profile(seconds(10), seconds(1), seconds(60));
  FakeGateway gw(5);
  gw.reachable = false;
  UserSession s(0, p, Rng(1), at_ms(60000));
  std::vector<RequestRecord> records;
  const auto next = s.step(at_ms(0), gw, [&](const RequestRecord& r) { records.push_back(r); });
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].outcome, Outcome::kConnectionError);
  EXPECT_EQ(next, at_ms(1000));
  EXPECT_EQ(s.requests_issued(), 1);
}

TEST(UserSessionTest, StopMidHoldReleases) {
  const LoadProfile p = fixed_profile(seconds(10), seconds(1), seconds(60));
  FakeGateway gw(5);
  UserSession s(0, p, Rng(1), at_ms(60000));
  s.step(at_ms(0), gw, nullptr);
  ASSERT_TRUE(s.holding());
  ASSERT_EQ(gw.open.size(), 1u);
  s.stop(gw);
  EXPECT_TRUE(s.done());
  EXPECT_TRUE(gw.open.empty());
  EXPECT_EQ(s.completed_streams(), 0);
  EXPECT_FALSE(s.step(at_ms(1000), gw, nullptr).has_value());
}

TEST(UserSessionTest, LatencyDelaysNextAction) {
  const LoadProfile p = fixed_profile(seconds(10), seconds(1), seconds(60));
  FakeGateway gw(0, Latency(2500));
  UserSession s(0, p, Rng(1), at_ms(60000));
  EXPECT_EQ(s.step(at_ms(0), gw, nullptr), at_ms(1003));
}

TEST(UserSessionTest, HoldDrawnWithinRange) {
  LoadProfile p = fixed_profile(seconds(9), seconds(1), seconds(600));
  p.stream_hold_max = seconds(11);
  FakeGateway gw(100);
  UserSession s(0, p, Rng(2), at_ms(600000));
  Timestamp now = at_ms(0);
  for (int i = 0; i < 50; ++i) {
    const Timestamp release_at = *s.step(now, gw, nullptr);
    ASSERT_GE(release_at - now, seconds(9));
    ASSERT_LE(release_at - now, seconds(11));
    now = *s.step(release_at, gw, nullptr);
  }
}

TEST(NearestRankTest, Definition) {
  std::vector<Latency> v;
  for (int i = 1; i <= 10; ++i) v.emplace_back(i * 1000);
  EXPECT_EQ(nearest_rank(v, 50), Latency(5000));
  EXPECT_EQ(nearest_rank(v, 95), Latency(10000));
  EXPECT_EQ(nearest_rank(v, 0), Latency(1000));
  EXPECT_EQ(nearest_rank(v, 100), Latency(10000));
  EXPECT_EQ(nearest_rank({}, 50), Latency(0));
}

TEST(AggregateTest, Empty) {
  EXPECT_TRUE(aggregate({}).seconds.empty());
}

TEST(AggregateTest, PercentilesPerSecond) {
  std::vector<RequestRecord> records;
  for (int i = 1; i <= 10; ++i) {
    records.push_back({0, "s" + std::to_string(i), at_ms(100 * i - 50), Outcome::kAdmitted, Latency(i * 1000)});
  }
  const LoadStats stats = aggregate(records);
  ASSERT_EQ(stats.seconds.size(), 1u);
  EXPECT_EQ(stats.seconds[0].p50, Latency(5000));
  EXPECT_EQ(stats.seconds[0].max, Latency(10000));
}

TEST(AggregateTest, CountsPerOutcome) {
  std::vector<RequestRecord> records;
  for (int i = 0; i < 3; ++i) records.push_back({i, "a", at_ms(5000 + i), Outcome::kAdmitted, Latency(1)});
  for (int i = 0; i < 2; ++i) records.push_back({i, "d", at_ms(5500 + i), Outcome::kDenied, Latency(1)});
  const LoadStats stats = aggregate(records, at_ms(0));
  ASSERT_EQ(stats.seconds.size(), 1u);
  EXPECT_EQ(stats.seconds[0].t, 5);
  EXPECT_EQ(stats.seconds[0].requests(), 5);
  EXPECT_EQ(stats.seconds[0].denied, 2);
}

TEST(AggregateTest, GapsAreFilled) {
  const std::vector<RequestRecord> records{{0, "a", at_ms(1000), Outcome::kAdmitted, Latency(1)},
                                           {0, "b", at_ms(4000), Outcome::kConnectionError, Latency(0)}};
  const LoadStats stats = aggregate(records, at_ms(0));
  ASSERT_EQ(stats.seconds.size(), 4u);
  EXPECT_EQ(stats.seconds[1].requests(), 0);
  EXPECT_EQ(stats.seconds[3].errors, 1);
}

TEST(AggregateTest, AttachUserCountsPadsToRunEnd) {
  LoadProfile p;
  p.run_duration = seconds(20);
  const std::vector<RequestRecord> records{{0, "a", at_ms(500), Outcome::kAdmitted, Latency(1)}};
  LoadStats stats = aggregate(records, at_ms(0));
  attach_user_counts(stats, p);
  ASSERT_EQ(stats.seconds.size(), 20u);
  EXPECT_EQ(stats.seconds[0].active_users, 10);
  EXPECT_EQ(stats.seconds[4].active_users, 50);
  EXPECT_EQ(stats.seconds[19].active_users, 100);
}

TEST(ToCsvTest, Format) {
  LoadStats stats;
  SecondStats s;
  s.t = 3;
  s.active_users = 30;
  s.admitted = 4;
  s.denied = 1;
  s.p50 = Latency(5250);
  s.p95 = Latency(7000);
  s.max = Latency(12001);
  stats.seconds.push_back(s);
  EXPECT_EQ(to_csv(stats),
            "t,active_users,rps,denials,p50_ms,p95_ms,max_ms\n"
            "3,30,5,1,5.250,7.000,12.001\n");
}

// A small population against a tight fake service: every record is counted
// exactly once, no stream leaks, and denials stop after capacity grows.
TEST(LoadgenPropertyTest, PopulationAgainstGrowingService) {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    LoadProfile p = fixed_profile(seconds(3), milliseconds(500), seconds(60));
    p.stream_hold_max = seconds(5);
    p.target_users = static_cast<int>(rng.between(1, 30));
    p.hatch_rate = static_cast<double>(rng.between(1, 20));
    FakeGateway gw(1);
    std::vector<UserSession> users;
    std::multimap<Timestamp, size_t> queue;
    for (int i = 0; i < p.target_users; ++i) {
      users.emplace_back(i, p, rng.fork(static_cast<uint64_t>(i)), at_ms(60000));
      queue.emplace(at_ms(0) + spawn_offset(p, i), users.size() - 1);
    }
    std::vector<RequestRecord> records;
    const RecordSink sink = [&](const RequestRecord& r) { records.push_back(r); };
    while (!queue.empty()) {
      const auto [t, idx] = *queue.begin();
      queue.erase(queue.begin());
      if (t >= at_ms(20000)) gw.set_slots(p.target_users);
      if (auto next = users[idx].step(t, gw, sink)) queue.emplace(*next, idx);
    }
    EXPECT_TRUE(gw.open.empty()) << "seed " << seed;
    int64_t issued = 0;
    for (const auto& u : users) {
      EXPECT_TRUE(u.done());
      issued += u.requests_issued();
    }
    EXPECT_EQ(static_cast<int64_t>(records.size()), issued);
    const LoadStats stats = aggregate(records, at_ms(0));
    int64_t total = 0;
    for (const auto& s : stats.seconds) {
      total += s.requests();
      if (s.t >= 21) EXPECT_EQ(s.denied, 0) << "seed " << seed << " t " << s.t;
    }
    EXPECT_EQ(total, issued);
  }
}

}  // namespace
}  // namespace scalepool::loadgen
