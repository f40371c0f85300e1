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

#include "scalepool/sinkpool/deployment.h"

#include <algorithm>

#include "scalepool/common/errors.h"

namespace scalepool::sinkpool {

std::string_view to_string(LifecycleKind kind) {
  switch (kind) {
    case LifecycleKind::kCreated: return "created";
    case LifecycleKind::kRunning: return "running";
    case LifecycleKind::kDraining: return "draining";
    case LifecycleKind::kTerminated: return "terminated";
  }
  return "unknown";
}

namespace {

LifecycleKind kind_for(PodPhase to) {
  switch (to) {
    case PodPhase::kPending: return LifecycleKind::kCreated;
    case PodPhase::kRunning: return LifecycleKind::kRunning;
    case PodPhase::kDraining: return LifecycleKind::kDraining;
    case PodPhase::kTerminated: return LifecycleKind::kTerminated;
  }
  return LifecycleKind::kCreated;
}

}  // namespace

Deployment::Deployment(std::string name, PodTemplate tmpl, uint64_t seed)
    : name_(std::move(name)), template_(tmpl), namer_(name_, seed) {
  if (template_.capacity <= 0) {
    throw ContractViolation("pod capacity must be positive");
  }
  if (template_.startup_delay < Duration::zero()) {
    throw ContractViolation("startup delay must be non-negative");
  }
  alloc_ = [this](const PodId&) {
    const int host = next_host_++;
    return "172.17." + std::to_string(host / 256) + "." + std::to_string(host % 256) + ":8080";
  };
}

PodInstance* Deployment::find_mut(const PodId& id) {
  const auto it = index_.find(id);
  return it == index_.end() ? nullptr : &pods_[it->second];
}

const PodInstance* Deployment::find(const PodId& id) const {
  const auto it = index_.find(id);
  return it == index_.end() ? nullptr : &pods_[it->second];
}

const PodInstance* Deployment::find_by_addr(std::string_view addr) const {
  // Newest first: an address may be reused after its pod terminated.
  for (auto it = pods_.rbegin(); it != pods_.rend(); ++it) {
    if (it->addr == addr && it->phase != PodPhase::kTerminated) return &*it;
  }
  return nullptr;
}

int Deployment::count(PodPhase phase) const {
  return static_cast<int>(
      std::count_if(pods_.begin(), pods_.end(), [phase](const PodInstance& p) { return p.phase == phase; }));
}

int Deployment::total_active_streams() const {
  int total = 0;
  for (const auto& p : pods_) total += p.active_streams;
  return total;
}

LifecycleEvent Deployment::transition(PodInstance& pod, PodPhase to, Timestamp now,
                                      std::string detail) {
  if (!is_legal_transition(pod.phase, to)) {
    throw ContractViolation("illegal pod transition " + std::string(to_string(pod.phase)) +
                            " -> " + std::string(to_string(to)));
  }
  if (to == PodPhase::kTerminated && pod.active_streams != 0) {
    ++forced_terminations_;
  }
  pod.phase = to;
  LifecycleEvent ev{now, pod.id, kind_for(to), std::move(detail)};
  log_.push_back(ev);
  return ev;
}

void Deployment::publish_metrics(const PodInstance& pod, Timestamp now) const {
  const metrics::Labels labels{{"pod", pod.id.value}};
  pod.registry->set_gauge(kActiveStreamsMetric, labels, pod.active_streams, now);
}

std::vector<LifecycleEvent> Deployment::scale_to(int replicas, Timestamp now) {
  if (replicas < 0) {
    throw ContractViolation("replica count must be non-negative");
  }
  std::vector<LifecycleEvent> events;
  desired_ = replicas;
  const int live = live_count();

  for (int i = live; i < replicas; ++i) {
    PodInstance pod;
    pod.id = namer_.next();
    pod.addr = alloc_(pod.id);
    pod.phase = PodPhase::kPending;
    pod.capacity = template_.capacity;
    pod.created_at = now;
    pod.ready_at = now + template_.startup_delay;
    pod.registry = std::make_shared<metrics::Registry>();
    const metrics::Labels labels{{"pod", pod.id.value}};
    pod.registry->increment_counter(kRequestsMetric, labels, 0.0, now);
    pod.registry->set_gauge(kActiveStreamsMetric, labels, 0.0, now);
    index_.emplace(pod.id, pods_.size());
    pods_.push_back(std::move(pod));
    LifecycleEvent ev{now, pods_.back().id, LifecycleKind::kCreated,
                      "addr=" + pods_.back().addr + " capacity=" + std::to_string(template_.capacity)};
    log_.push_back(ev);
    events.push_back(std::move(ev));
  }

  if (replicas < live) {
    std::vector<PodInstance*> candidates;
    for (auto& p : pods_) {
      if (p.live()) candidates.push_back(&p);
    }
    std::ranges::sort(candidates, [](const PodInstance* a, const PodInstance* b) {
      if (a->active_streams != b->active_streams) return a->active_streams < b->active_streams;
      if (a->created_at != b->created_at) return a->created_at > b->created_at;
      return a->id > b->id;
    });
    for (int i = 0; i < live - replicas; ++i) {
      PodInstance& victim = *candidates[i];
      if (victim.phase == PodPhase::kPending) {
        events.push_back(transition(victim, PodPhase::kTerminated, now, "startup aborted"));
        continue;
      }
      events.push_back(transition(victim, PodPhase::kDraining, now,
                                  "active=" + std::to_string(victim.active_streams)));
      if (victim.active_streams == 0) {
        events.push_back(transition(victim, PodPhase::kTerminated, now, "drained"));
      }
    }
  }
  return events;
}

std::vector<LifecycleEvent> Deployment::mark_running(const PodId& id, Timestamp now) {
  PodInstance* pod = find_mut(id);
  if (pod == nullptr) {
    throw ContractViolation("unknown pod " + id.value);
  }
  if (pod->phase != PodPhase::kPending) return {};
  return {transition(*pod, PodPhase::kRunning, now, "addr=" + pod->addr)};
}

Admission Deployment::admit_stream(const PodId& id, std::string_view stream_id, Timestamp now) {
  PodInstance* pod = find_mut(id);
  if (pod == nullptr) {
    throw ContractViolation("unknown pod " + id.value);
  }
  ++pod->request_counter;
  pod->registry->increment_counter(kRequestsMetric, {{"pod", pod->id.value}}, 1.0, now);

  Admission outcome = Admission::kAdmitted;
  if (pod->phase == PodPhase::kDraining) {
    outcome = Admission::kDraining;
  } else if (pod->phase != PodPhase::kRunning) {
    outcome = Admission::kNotRunning;
  } else if (pod->active_streams >= pod->capacity) {
    outcome = Admission::kOverloaded;
  } else if (pod->streams.contains(stream_id)) {
    throw ContractViolation("stream " + std::string(stream_id) + " already active on " + id.value);
  }

  if (admitted(outcome)) {
    pod->streams.emplace(stream_id);
    ++pod->active_streams;
    ++pod->admitted_total;
    ++admitted_total_;
    publish_metrics(*pod, now);
  } else {
    ++pod->denied_total;
    ++denied_total_;
  }
  return outcome;
}

std::vector<LifecycleEvent> Deployment::release_stream(const PodId& id, std::string_view stream_id,
                                                       Timestamp now) {
  PodInstance* pod = find_mut(id);
  if (pod == nullptr) {
    throw ContractViolation("unknown pod " + id.value);
  }
  const auto it = pod->streams.find(stream_id);
  if (it == pod->streams.end()) {
    throw ContractViolation("stream " + std::string(stream_id) + " is not active on " + id.value);
  }
  pod->streams.erase(it);
  --pod->active_streams;
  publish_metrics(*pod, now);
  if (pod->phase == PodPhase::kDraining && pod->active_streams == 0) {
    return {transition(*pod, PodPhase::kTerminated, now, "drained")};
  }
  return {};
}

}  // namespace scalepool::sinkpool
