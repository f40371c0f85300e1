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

#ifndef SCALEPOOL_SINKPOOL_POD_H_
#define SCALEPOOL_SINKPOOL_POD_H_

#include <compare>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "scalepool/common/rng.h"
#include "scalepool/common/time.h"
#include "scalepool/metrics/registry.h"
#include "scalepool/metrics/sample.h"

namespace scalepool::sinkpool {

inline constexpr std::string_view kRequestsMetric = "vsp_http_requests_total";
inline constexpr std::string_view kActiveStreamsMetric = "vsp_active_streams";

// `<deployment>-<hash>-<suffix>`, e.g. vsp-7c64fd69cf-qsw9j.
struct PodId {
  std::string value;

  friend auto operator<=>(const PodId&, const PodId&) = default;
};

// Issues pod names for one deployment. The 10-char hash is fixed per
// deployment and seed; suffixes are drawn per creation and never repeat.
class PodNamer {
 public:
  PodNamer(std::string deployment, uint64_t seed);

  PodId next();
  const std::string& template_hash() const { return hash_; }

 private:
  std::string deployment_;
  std::string hash_;
  Rng rng_;
  std::set<std::string> issued_;
};

// Legal moves: Pending->Running, Running->Draining, Draining->Terminated,
// Pending->Terminated.
enum class PodPhase { kPending, kRunning, kDraining, kTerminated };

std::string_view to_string(PodPhase phase);
bool is_legal_transition(PodPhase from, PodPhase to);

enum class Admission { kAdmitted, kOverloaded, kDraining, kNotRunning };

std::string_view to_string(Admission a);
inline bool admitted(Admission a) { return a == Admission::kAdmitted; }

struct PodInstance {
  PodId id;
  std::string addr;
  PodPhase phase = PodPhase::kPending;
  int capacity = 0;
  int active_streams = 0;
  uint64_t request_counter = 0;
  uint64_t admitted_total = 0;
  uint64_t denied_total = 0;
  int restarts = 0;
  Timestamp created_at{};
  Timestamp ready_at{};
  std::set<std::string, std::less<>> streams;
  // Exposition source for this pod; shared with its /metrics endpoint.
  std::shared_ptr<metrics::Registry> registry;

  bool live() const { return phase == PodPhase::kPending || phase == PodPhase::kRunning; }
};

// vsp_http_requests_total and vsp_active_streams for this pod.
std::vector<metrics::Sample> pod_samples(const PodInstance& pod, Timestamp now);

}  // namespace scalepool::sinkpool

#endif  // SCALEPOOL_SINKPOOL_POD_H_
