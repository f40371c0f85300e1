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

#include "scalepool/loadgen/loadgen.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "scalepool/common/errors.h"

namespace scalepool::loadgen {

void LoadProfile::validate() const {
  if (target_users < 1) throw ContractViolation("target_users must be at least 1");
  if (!(hatch_rate > 0.0) || !std::isfinite(hatch_rate)) {
    throw ContractViolation("hatch_rate must be positive");
  }
  if (stream_hold_min <= Duration::zero() || stream_hold_max < stream_hold_min) {
    throw ContractViolation("stream hold must be positive with min <= max");
  }
  if (think_time < Duration::zero()) throw ContractViolation("think_time must be non-negative");
  if (run_duration < Duration::zero()) throw ContractViolation("run_duration must be non-negative");
}

int spawn_schedule(const LoadProfile& profile, Duration t) {
  if (t <= Duration::zero()) return 0;
  const double spawned = std::floor(profile.hatch_rate * static_cast<double>(t.count()) / 1000.0);
  if (spawned >= profile.target_users) return profile.target_users;
  return static_cast<int>(spawned);
}

Duration spawn_offset(const LoadProfile& profile, int index) {
  // Estimate, then settle on the first millisecond the schedule covers index.
  auto ms = static_cast<int64_t>(std::ceil((index + 1) * 1000.0 / profile.hatch_rate));
  while (ms > 0 && spawn_schedule(profile, Duration(ms - 1)) > index) --ms;
  while (spawn_schedule(profile, Duration(ms)) <= index) ++ms;
  return Duration(ms);
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::kAdmitted: return "admitted";
    case Outcome::kDenied: return "denied";
    case Outcome::kConnectionError: return "connection_error";
  }
  return "unknown";
}

UserSession::UserSession(int user_id, const LoadProfile& profile, Rng rng, Timestamp stop_at)
    : user_id_(user_id), profile_(profile), rng_(rng), stop_at_(stop_at) {}

namespace {

Duration ceil_ms(Latency l) { return std::chrono::ceil<Duration>(l); }

}  // namespace

std::optional<Timestamp> UserSession::step(Timestamp now, ServiceGateway& gateway,
                                           const RecordSink& sink) {
  if (state_ == State::kDone) return std::nullopt;
  if (now >= stop_at_) {
    stop(gateway);
    return std::nullopt;
  }

  if (state_ == State::kHolding) {
    gateway.release(endpoint_, stream_);
    ++completed_;
    state_ = State::kRequest;
    return now + profile_.think_time;
  }

  stream_ = "u" + std::to_string(user_id_) + "-s" + std::to_string(seq_++);
  RequestRecord rec{user_id_, stream_, now, Outcome::kConnectionError, Latency{0}};
  ++issued_;
  if (auto endpoint = gateway.resolve_endpoint()) {
    endpoint_ = std::move(*endpoint);
    const auto reply = gateway.upload(endpoint_, stream_);
    rec.outcome = reply.outcome;
    rec.latency = reply.latency;
  }
  if (sink) sink(rec);

  if (rec.outcome == Outcome::kAdmitted) {
    state_ = State::kHolding;
    const int64_t hold =
        rng_.between(to_ms(profile_.stream_hold_min), to_ms(profile_.stream_hold_max));
    return now + ceil_ms(rec.latency) + Duration(hold);
  }
  return now + ceil_ms(rec.latency) + profile_.think_time;
}

void UserSession::stop(ServiceGateway& gateway) {
  if (state_ == State::kHolding) gateway.release(endpoint_, stream_);
  state_ = State::kDone;
}

Latency nearest_rank(std::span<const Latency> sorted, int percentile) {
  if (sorted.empty()) return Latency{0};
  const size_t n = sorted.size();
  size_t rank = (static_cast<size_t>(percentile) * n + 99) / 100;
  rank = std::clamp<size_t>(rank, 1, n);
  return sorted[rank - 1];
}

LoadStats aggregate(std::span<const RequestRecord> records, Timestamp origin) {
  LoadStats stats;
  if (records.empty()) return stats;
  std::map<int64_t, std::vector<const RequestRecord*>> buckets;
  for (const auto& r : records) {
    const int64_t ms = to_ms(r.sent_at) - to_ms(origin);
    const int64_t sec = ms >= 0 ? ms / 1000 : -((-ms + 999) / 1000);
    buckets[sec].push_back(&r);
  }
  const int64_t first = buckets.begin()->first;
  const int64_t last = buckets.rbegin()->first;
  for (int64_t sec = first; sec <= last; ++sec) {
    SecondStats s;
    s.t = sec;
    const auto it = buckets.find(sec);
    if (it != buckets.end()) {
      std::vector<Latency> lat;
      lat.reserve(it->second.size());
      for (const RequestRecord* r : it->second) {
        switch (r->outcome) {
          case Outcome::kAdmitted: ++s.admitted; break;
          case Outcome::kDenied: ++s.denied; break;
          case Outcome::kConnectionError: ++s.errors; break;
        }
        lat.push_back(r->latency);
      }
      std::ranges::sort(lat);
      s.p50 = nearest_rank(lat, 50);
      s.p95 = nearest_rank(lat, 95);
      s.max = lat.back();
    }
    stats.seconds.push_back(s);
  }
  return stats;
}

void attach_user_counts(LoadStats& stats, const LoadProfile& profile) {
  const int64_t end_sec = (to_ms(profile.run_duration) + 999) / 1000;
  int64_t next = stats.seconds.empty() ? 0 : stats.seconds.back().t + 1;
  for (; next < end_sec; ++next) stats.seconds.push_back(SecondStats{.t = next});
  for (auto& s : stats.seconds) {
    // Users present by the end of the second.
    const Duration at = std::min(Duration((s.t + 1) * 1000), profile.run_duration);
    s.active_users = s.t < end_sec ? spawn_schedule(profile, at) : 0;
  }
}

namespace {

std::string format_latency_ms(Latency l) {
  char buf[32];
  const int64_t us = l.count();
  std::snprintf(buf, sizeof(buf), "%lld.%03lld", static_cast<long long>(us / 1000),
                static_cast<long long>(us % 1000));
  return buf;
}

}  // namespace

std::string to_csv(const LoadStats& stats) {
  std::string out = "t,active_users,rps,denials,p50_ms,p95_ms,max_ms\n";
  for (const auto& s : stats.seconds) {
    out += std::to_string(s.t) + "," + std::to_string(s.active_users) + "," +
           std::to_string(s.requests()) + "," + std::to_string(s.denied) + "," +
           format_latency_ms(s.p50) + "," + format_latency_ms(s.p95) + "," +
           format_latency_ms(s.max) + "\n";
  }
  return out;
}

}  // namespace scalepool::loadgen
