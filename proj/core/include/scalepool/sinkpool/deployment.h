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

#ifndef SCALEPOOL_SINKPOOL_DEPLOYMENT_H_
#define SCALEPOOL_SINKPOOL_DEPLOYMENT_H_

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "scalepool/common/time.h"
#include "scalepool/sinkpool/pod.h"

namespace scalepool::sinkpool {

struct PodTemplate {
  int capacity = 20;
  Duration startup_delay = std::chrono::seconds(2);
};

enum class LifecycleKind { kCreated, kRunning, kDraining, kTerminated };

std::string_view to_string(LifecycleKind kind);

struct LifecycleEvent {
  Timestamp t{};
  PodId pod;
  LifecycleKind event = LifecycleKind::kCreated;
  std::string detail;
};

// Assigns a network address to a new pod. The default hands out
// 172.17.0.10:8080, 172.17.0.11:8080, ...
using AddressAllocator = std::function<std::string(const PodId&)>;

// The pod pool behind one Deployment. Single owner: every mutation is applied
// by one task, in message order.
class Deployment {
 public:
  Deployment(std::string name, PodTemplate tmpl, uint64_t seed);
  Deployment(const Deployment&) = delete;
  Deployment& operator=(const Deployment&) = delete;

  void set_address_allocator(AddressAllocator alloc) { alloc_ = std::move(alloc); }

  // Grows by creating Pending pods (ready at now + startup_delay; the owner
  // calls mark_running then). Shrinks by draining the live pods with the
  // fewest active streams, newest first on ties. Pending victims terminate
  // at once; Running victims drain and terminate on their last release.
  std::vector<LifecycleEvent> scale_to(int replicas, Timestamp now);

  // Startup finished. No-op (empty result) if the pod left Pending meanwhile.
  std::vector<LifecycleEvent> mark_running(const PodId& id, Timestamp now);

  // Every call counts as a received request, admitted or not.
  Admission admit_stream(const PodId& id, std::string_view stream_id, Timestamp now);

  // Throws ContractViolation if the stream is not active on the pod.
  std::vector<LifecycleEvent> release_stream(const PodId& id, std::string_view stream_id,
                                             Timestamp now);

  const std::string& name() const { return name_; }
  const PodTemplate& pod_template() const { return template_; }
  int desired_replicas() const { return desired_; }

  // All pods ever created, in creation order; terminated ones included.
  const std::vector<PodInstance>& pods() const { return pods_; }
  const PodInstance* find(const PodId& id) const;
  const PodInstance* find_by_addr(std::string_view addr) const;

  int count(PodPhase phase) const;
  int live_count() const { return count(PodPhase::kPending) + count(PodPhase::kRunning); }
  int total_active_streams() const;
  uint64_t admitted_total() const { return admitted_total_; }
  uint64_t denied_total() const { return denied_total_; }
  // Streams that were still open when their pod terminated. Zero by
  // construction; the audit checks it anyway.
  int forced_terminations() const { return forced_terminations_; }

  // Every phase change ever applied, in order.
  const std::vector<LifecycleEvent>& event_log() const { return log_; }

 private:
  PodInstance* find_mut(const PodId& id);
  LifecycleEvent transition(PodInstance& pod, PodPhase to, Timestamp now, std::string detail);
  void publish_metrics(const PodInstance& pod, Timestamp now) const;

  std::string name_;
  PodTemplate template_;
  PodNamer namer_;
  AddressAllocator alloc_;
  int next_host_ = 10;
  int desired_ = 0;
  std::vector<PodInstance> pods_;
  std::map<PodId, size_t> index_;
  uint64_t admitted_total_ = 0;
  uint64_t denied_total_ = 0;
  int forced_terminations_ = 0;
  std::vector<LifecycleEvent> log_;
};

}  // namespace scalepool::sinkpool

#endif  // SCALEPOOL_SINKPOOL_DEPLOYMENT_H_
