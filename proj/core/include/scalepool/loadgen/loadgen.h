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

#ifndef SCALEPOOL_LOADGEN_LOADGEN_H_
#define SCALEPOOL_LOADGEN_LOADGEN_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scalepool/common/rng.h"
#include "scalepool/common/time.h"

namespace scalepool::loadgen {

using Latency = std::chrono::microseconds;

struct LoadProfile {
  int target_users = 100;
  double hatch_rate = 10.0;  // users per second
  // Hold is uniform in [min, max]; equal bounds give a fixed hold.
  Duration stream_hold_min = std::chrono::seconds(30);
  Duration stream_hold_max = std::chrono::seconds(30);
  Duration think_time = std::chrono::seconds(1);
  Duration run_duration = std::chrono::seconds(120);

  // Throws ContractViolation.
  void validate() const;
};

// Users active `t` after load start: min(target_users, floor(hatch_rate * t)).
int spawn_schedule(const LoadProfile& profile, Duration t);

// Earliest offset at which user `index` (0-based) is active.
Duration spawn_offset(const LoadProfile& profile, int index);

enum class Outcome { kAdmitted, kDenied, kConnectionError };

std::string_view to_string(Outcome o);

struct RequestRecord {
  int user_id = 0;
  std::string stream_id;
  Timestamp sent_at{};
  Outcome outcome = Outcome::kAdmitted;
  Latency latency{0};
};

// The client's view of the service: controller lookup, then upload and
// release against the returned endpoint.
class ServiceGateway {
 public:
  struct UploadReply {
    Outcome outcome = Outcome::kConnectionError;
    Latency latency{0};
  };

  virtual ~ServiceGateway() = default;
  // nullopt when the controller cannot be reached.
  virtual std::optional<std::string> resolve_endpoint() = 0;
  virtual UploadReply upload(const std::string& endpoint, const std::string& stream_id) = 0;
  virtual void release(const std::string& endpoint, const std::string& stream_id) = 0;
};

using RecordSink = std::function<void(const RequestRecord&)>;

// One emulated user as a resumable state machine, so the same logic runs on
// the logical clock and on wall-clock threads. Loop: resolve endpoint,
// upload, hold, release, think. Denials and connection errors retry after
// think_time.
class UserSession {
 public:
  UserSession(int user_id, const LoadProfile& profile, Rng rng, Timestamp stop_at);

  // Runs the action due at `now`; returns when to call again, or nullopt
  // once the session is over.
  std::optional<Timestamp> step(Timestamp now, ServiceGateway& gateway, const RecordSink& sink);

  // Stop signal: releases a held stream and ends the session.
  void stop(ServiceGateway& gateway);

  int user_id() const { return user_id_; }
  bool done() const { return state_ == State::kDone; }
  bool holding() const { return state_ == State::kHolding; }
  // Streams released at the end of their hold (not cut short by stop).
  int completed_streams() const { return completed_; }
  int64_t requests_issued() const { return issued_; }

 private:
  enum class State { kRequest, kHolding, kDone };

  int user_id_;
  LoadProfile profile_;
  Rng rng_;
  Timestamp stop_at_;
  State state_ = State::kRequest;
  std::string endpoint_;
  std::string stream_;
  int64_t seq_ = 0;
  int completed_ = 0;
  int64_t issued_ = 0;
};

struct SecondStats {
  int64_t t = 0;  // whole seconds since load start
  int active_users = 0;
  int admitted = 0;
  int denied = 0;
  int errors = 0;
  Latency p50{0};
  Latency p95{0};
  Latency max{0};

  int requests() const { return admitted + denied + errors; }
};

struct LoadStats {
  std::vector<SecondStats> seconds;
};

// Buckets by whole second of sent_at - origin, from the first to the last
// non-empty second. Percentiles are nearest-rank per bucket.
LoadStats aggregate(std::span<const RequestRecord> records, Timestamp origin = Timestamp{});

// Fills active_users from the spawn schedule and pads the series out to the
// end of the load phase.
void attach_user_counts(LoadStats& stats, const LoadProfile& profile);

// Nearest-rank percentile of an ascending list: element ceil(p/100 * n).
Latency nearest_rank(std::span<const Latency> sorted, int percentile);

// loadstats.csv: t,active_users,rps,denials,p50_ms,p95_ms,max_ms
std::string to_csv(const LoadStats& stats);

}  // namespace scalepool::loadgen

#endif  // SCALEPOOL_LOADGEN_LOADGEN_H_
