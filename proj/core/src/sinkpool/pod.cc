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

#include "scalepool/sinkpool/pod.h"

namespace scalepool::sinkpool {

namespace {

// Name alphabet used for generated object suffixes: no vowels, no
// look-alike digits.
constexpr std::string_view kSuffixAlphabet = "bcdfghjklmnpqrstvwxz2456789";
constexpr std::string_view kHex = "0123456789abcdef";

}  // namespace

PodNamer::PodNamer(std::string deployment, uint64_t seed)
    : deployment_(std::move(deployment)), rng_(Rng(seed).fork("pod-names:" + deployment_)) {
  Rng hash_rng = Rng(seed).fork("template-hash:" + deployment_);
  for (int i = 0; i < 10; ++i) hash_ += kHex[hash_rng.below(kHex.size())];
}

PodId PodNamer::next() {
  while (true) {
    std::string suffix;
    for (int i = 0; i < 5; ++i) suffix += kSuffixAlphabet[rng_.below(kSuffixAlphabet.size())];
    if (issued_.insert(suffix).second) {
      return PodId{deployment_ + "-" + hash_ + "-" + suffix};
    }
  }
}

std::string_view to_string(PodPhase phase) {
  switch (phase) {
    case PodPhase::kPending: return "Pending";
    case PodPhase::kRunning: return "Running";
    case PodPhase::kDraining: return "Draining";
    case PodPhase::kTerminated: return "Terminated";
  }
  return "Unknown";
}

bool is_legal_transition(PodPhase from, PodPhase to) {
  switch (from) {
    case PodPhase::kPending: return to == PodPhase::kRunning || to == PodPhase::kTerminated;
    case PodPhase::kRunning: return to == PodPhase::kDraining;
    case PodPhase::kDraining: return to == PodPhase::kTerminated;
    case PodPhase::kTerminated: return false;
  }
  return false;
}

std::string_view to_string(Admission a) {
  switch (a) {
    case Admission::kAdmitted: return "admitted";
    case Admission::kOverloaded: return "overloaded";
    case Admission::kDraining: return "draining";
    case Admission::kNotRunning: return "not running";
  }
  return "unknown";
}

std::vector<metrics::Sample> pod_samples(const PodInstance& pod, Timestamp now) {
  const metrics::Labels labels{{"pod", pod.id.value}};
  return {
      metrics::Sample{std::string(kRequestsMetric), labels,
                      static_cast<double>(pod.request_counter), now},
      metrics::Sample{std::string(kActiveStreamsMetric), labels,
                      static_cast<double>(pod.active_streams), now},
  };
}

}  // namespace scalepool::sinkpool
