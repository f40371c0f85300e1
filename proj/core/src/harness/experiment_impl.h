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

#ifndef SCALEPOOL_SRC_HARNESS_EXPERIMENT_IMPL_H_
#define SCALEPOOL_SRC_HARNESS_EXPERIMENT_IMPL_H_

#include <atomic>
#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "scalepool/harness/clock.h"
#include "scalepool/harness/experiment.h"
#include "scalepool/metrics/counter_series.h"
#include "scalepool/metrics/scrape.h"

namespace scalepool::harness {

class RealtimeStack;

struct Experiment::Impl {
  Impl(ScenarioConfig config, descriptors::DeploymentPlan plan);
  ~Impl();

  // --- Timeline, all on the executor. ---
  void bootstrap();
  void begin_load();
  void end_load();
  void tick();
  void scrape_if_due();
  void scrape_loop();
  void finish(std::string_view why);
  void spawn_user(int index);
  void step_user(size_t slot);

  // --- Message handlers, all on the executor. ---
  std::optional<std::string> balancer_schedule(const std::string& conn_id);
  void balancer_complete(const std::string& conn_id);
  std::optional<std::string> balancer_route(const std::string& conn_id) const;
  sinkpool::Admission pod_admit(const std::string& addr, const std::string& stream_id);
  void pod_release(const std::string& addr, const std::string& stream_id);
  int pod_active_streams(const std::string& addr) const;

  void handle_lifecycle(const std::vector<sinkpool::LifecycleEvent>& events);
  void sync_balancer();
  void record_row(std::string event);
  void audit_conservation();
  void log_event(Timestamp t, const std::string& pod, std::string_view event,
                 const std::string& detail);
  std::vector<metrics::ScrapeTarget> scrape_targets() const;

  // Any thread.
  void record_request(const loadgen::RequestRecord& rec);
  int requests_last_second(Timestamp now);

  ExperimentResult collect();
  std::vector<AuditResult> run_audits() const;

  ScenarioConfig config;
  descriptors::DeploymentPlan plan;
  autoscaler::HpaSpec spec;
  uint64_t seed = 0;
  Rng rng;
  Rng latency_rng;

  LogicalClock sim_clock;
  std::unique_ptr<RealtimeLoop> loop;
  Executor* exec = nullptr;
  std::unique_ptr<RealtimeStack> stack;

  sinkpool::Deployment pool;
  balancer::VirtualService vs;
  Controller controller;
  metrics::SeriesStore store;
  autoscaler::HpaStatus status;
  TraceRecorder trace;
  std::vector<TickSummary> ticks;
  std::vector<std::string> event_log;

  Timestamp load_start{};
  Timestamp load_end{};
  Timestamp settle_deadline{};
  std::optional<Timestamp> settled_at;
  std::optional<Timestamp> last_scrape;
  Timestamp finished_at{};
  bool bootstrapped = false;
  bool load_begun = false;
  bool load_ended = false;

  std::vector<std::unique_ptr<loadgen::UserSession>> sessions;
  std::unique_ptr<loadgen::ServiceGateway> sim_gateway;

  mutable std::mutex records_mu;
  std::vector<loadgen::RequestRecord> records;
  std::deque<Timestamp> recent_requests;

  int conservation_checks = 0;
  int conservation_violations = 0;
  std::string first_violation;

  std::mutex done_mu;
  std::condition_variable done_cv;
  std::atomic<bool> done{false};
};

// Real-time transport: HTTP listeners for the controller, the balancer and
// every pod, plus one client thread per emulated user.
class RealtimeStack {
 public:
  explicit RealtimeStack(Experiment::Impl& impl);
  ~RealtimeStack();

  // Binds the controller and balancer listeners; returns the balancer address.
  std::string start_frontends();
  // AddressAllocator for the pool: starts a pod listener, returns host:port.
  std::string start_pod(const sinkpool::PodId& id);
  void attach_registry(const std::string& addr, std::shared_ptr<metrics::Registry> registry);
  void stop_pod(const std::string& addr);
  std::string fetch_metrics(const std::string& addr) const;
  const std::string& controller_url() const;

  void start_user(int index, Timestamp at);
  // Wakes every user thread so it releases its stream and exits.
  void stop_users();
  void join_users();
  void shutdown();

 private:
  struct State;
  std::unique_ptr<State> state_;
};

}  // namespace scalepool::harness

#endif  // SCALEPOOL_SRC_HARNESS_EXPERIMENT_IMPL_H_
