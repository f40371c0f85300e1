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

#ifndef SCALEPOOL_TESTS_SUPPORT_SCALEPOOL_TESTING_H_
#define SCALEPOOL_TESTS_SUPPORT_SCALEPOOL_TESTING_H_

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "scalepool/balancer/virtual_service.h"
#include "scalepool/common/errors.h"
#include "scalepool/common/rng.h"
#include "scalepool/harness/scenario.h"
#include "scalepool/metrics/registry.h"
#include "scalepool/sinkpool/deployment.h"

namespace scalepool::testing {

inline std::filesystem::path source_path(const std::string& rel) {
  return std::filesystem::path(SCALEPOOL_SOURCE_DIR) / rel;
}

// Replica recommendation computed on exact rationals: the usage ratio
// avg/target is compared with the tolerance, then current * ratio is
// rounded up.
inline int oracle_desired(int current, int64_t avg_millis, int64_t target_millis,
                          int64_t tolerance_millis) {
  using boost::multiprecision::cpp_rational;
  const cpp_rational ratio(avg_millis, target_millis);
  cpp_rational deviation = ratio - 1;
  if (deviation < 0) deviation = -deviation;
  if (deviation <= cpp_rational(tolerance_millis, 1000)) return current;
  const cpp_rational want = ratio * current;
  const auto num = boost::multiprecision::numerator(want);
  const auto den = boost::multiprecision::denominator(want);
  boost::multiprecision::cpp_int q = num / den;
  if (q * den < num) q += 1;
  return q.convert_to<int>();
}

inline std::string random_token(Rng& rng, std::string_view alphabet, int min_len, int max_len) {
  const int len = static_cast<int>(rng.between(min_len, max_len));
  std::string out;
  for (int i = 0; i < len; ++i) out += alphabet[rng.below(alphabet.size())];
  return out;
}

inline std::string random_metric_name(Rng& rng) {
  static constexpr std::string_view kHead = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_:";
  static constexpr std::string_view kTail =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_:0123456789";
  return random_token(rng, kHead, 1, 1) + random_token(rng, kTail, 0, 12);
}

inline std::string random_label_name(Rng& rng) {
  static constexpr std::string_view kHead = "abcdefghijklmnopqrstuvwxyz_";
  static constexpr std::string_view kTail = "abcdefghijklmnopqrstuvwxyz_0123456789";
  return random_token(rng, kHead, 1, 1) + random_token(rng, kTail, 0, 8);
}

inline std::string random_label_value(Rng& rng) {
  static constexpr std::string_view kChars = "abcxyz019 -_.,={}\"\\\n/";
  return random_token(rng, kChars, 0, 10);
}

inline double random_value(Rng& rng) {
  switch (rng.below(6)) {
    case 0: return static_cast<double>(rng.between(0, 1000000));
    case 1: return static_cast<double>(rng.below(1u << 20)) / 1024.0;
    case 2: return std::ldexp(static_cast<double>(rng.below(1ull << 53)), static_cast<int>(rng.between(-60, 60)));
    case 3: return 0.0;
    case 4: return 1e300 * static_cast<double>(rng.between(1, 9));
    default: return static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
  }
}

// Counters only receive non-negative increments; gauges take any finite
// value.
inline void fill_random_registry(metrics::Registry& reg, Rng& rng) {
  const int series = static_cast<int>(rng.between(0, 12));
  for (int i = 0; i < series; ++i) {
    const std::string name = random_metric_name(rng);
    metrics::Labels labels;
    const int nlabels = static_cast<int>(rng.between(0, 3));
    for (int j = 0; j < nlabels; ++j) labels[random_label_name(rng)] = random_label_value(rng);
    const Timestamp t = at_ms(static_cast<int64_t>(rng.below(100000)));
    try {
      if (rng.below(2) == 0) {
        reg.increment_counter(name, labels, random_value(rng), t);
      } else {
        double v = random_value(rng);
        if (rng.below(4) == 0) v = -v;
        reg.set_gauge(name, labels, v, t);
      }
    } catch (const ContractViolation&) {
      // Same key drawn twice with a different kind; skip it.
    }
  }
}

struct ChurnStats {
  int checks = 0;
  int violations = 0;
  int forced_terminations = 0;
  int admitted = 0;
  int denied = 0;
  std::string first_violation;
};

// Drives a pool and a balancer wired the way the harness wires them through
// a random mix of scale changes, pod readiness, stream opens and releases.
// Conservation (balancer active == pod active) is audited after every step.
inline ChurnStats run_churn(uint64_t seed, int steps) {
  Rng rng(seed);
  sinkpool::PodTemplate tmpl;
  tmpl.capacity = static_cast<int>(rng.between(1, 5));
  tmpl.startup_delay = Duration(static_cast<int64_t>(rng.between(0, 50)));
  sinkpool::Deployment pool("vsp", tmpl, seed);
  const auto sched = static_cast<balancer::Scheduler>(rng.below(3));
  balancer::VirtualService vs("10.0.0.1:80", sched);

  ChurnStats stats;
  int64_t now_ms = 0;
  int next_conn = 0;
  std::vector<std::pair<std::string, std::string>> open;  // conn, addr

  auto sync = [&] {
    std::vector<balancer::Endpoint> eps;
    for (const auto& p : pool.pods()) {
      if (p.phase == sinkpool::PodPhase::kTerminated) continue;
      eps.push_back({p.addr, p.phase == sinkpool::PodPhase::kRunning, 1});
    }
    vs.sync_endpoints(eps);
  };
  auto audit = [&] {
    ++stats.checks;
    if (vs.total_active() != pool.total_active_streams()) {
      if (stats.violations++ == 0) {
        stats.first_violation = "t=" + std::to_string(now_ms) + " balancer=" +
                                std::to_string(vs.total_active()) +
                                " pods=" + std::to_string(pool.total_active_streams());
      }
    }
  };
  auto release = [&](size_t idx) {
    const auto [conn, addr] = open[idx];
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(idx));
    const auto* pod = pool.find_by_addr(addr);
    pool.release_stream(pod->id, conn, at_ms(now_ms));
    sync();
    vs.complete(conn);
  };

  pool.scale_to(static_cast<int>(rng.between(1, 4)), at_ms(now_ms));
  sync();
  for (int step = 0; step < steps; ++step) {
    now_ms += static_cast<int64_t>(rng.between(1, 20));
    const Timestamp now = at_ms(now_ms);
    switch (rng.below(10)) {
      case 0:
        pool.scale_to(static_cast<int>(rng.between(0, 8)), now);
        sync();
        break;
      case 1:
      case 2: {
        std::vector<sinkpool::PodId> pending;
        for (const auto& p : pool.pods()) {
          if (p.phase == sinkpool::PodPhase::kPending && p.ready_at <= now) pending.push_back(p.id);
        }
        if (!pending.empty()) {
          pool.mark_running(pending[rng.below(pending.size())], now);
          sync();
        }
        break;
      }
      case 3:
      case 4:
      case 5:
      case 6: {
        const std::string conn = "c" + std::to_string(next_conn++);
        std::string addr;
        try {
          addr = vs.schedule(conn).addr;
        } catch (const NoEndpoint&) {
          break;
        }
        const auto* pod = pool.find_by_addr(addr);
        const auto admission = pool.admit_stream(pod->id, conn, now);
        if (sinkpool::admitted(admission)) {
          open.emplace_back(conn, addr);
          ++stats.admitted;
        } else {
          vs.complete(conn);
          ++stats.denied;
        }
        break;
      }
      default:
        if (!open.empty()) release(rng.below(open.size()));
        break;
    }
    audit();
  }
  while (!open.empty()) {
    ++now_ms;
    release(open.size() - 1);
    audit();
  }
  stats.forced_terminations = pool.forced_terminations();
  return stats;
}

}  // namespace scalepool::testing

#endif  // SCALEPOOL_TESTS_SUPPORT_SCALEPOOL_TESTING_H_
