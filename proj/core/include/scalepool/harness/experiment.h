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

#ifndef SCALEPOOL_HARNESS_EXPERIMENT_H_
#define SCALEPOOL_HARNESS_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "scalepool/autoscaler/hpa.h"
#include "scalepool/balancer/virtual_service.h"
#include "scalepool/common/time.h"
#include "scalepool/descriptors/descriptors.h"
#include "scalepool/harness/scenario.h"
#include "scalepool/harness/trace.h"
#include "scalepool/loadgen/loadgen.h"
#include "scalepool/sinkpool/deployment.h"

namespace scalepool::harness {

// Hands out the service endpoint to clients. Unavailable until started.
class Controller {
 public:
  void start(std::string endpoint);
  void stop();
  // Throws Unavailable.
  std::string endpoint() const;
  bool running() const;

 private:
  mutable std::mutex mu_;
  std::optional<std::string> endpoint_;
};

// What the autoscaler saw at one tick, with the load offered at that moment.
struct TickSummary {
  Timestamp t{};
  bool skipped = false;
  std::optional<metrics::MilliValue> average;
  int running = 0;
  int desired = 0;  // after the tick
  uint64_t admitted_total = 0;
  uint64_t denied_total = 0;
  int active_users = 0;
};

struct AuditResult {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct ExperimentResult {
  Mode mode = Mode::kSimulated;
  uint64_t seed = 0;
  Timestamp load_start{};
  Timestamp load_end{};
  Timestamp finished_at{};
  std::optional<Timestamp> settled_at;
  int min_replicas = 0;
  int max_replicas = 0;
  int capacity = 0;
  balancer::Scheduler scheduler = balancer::Scheduler::kRoundRobin;

  TraceRecorder trace;
  std::vector<TickSummary> ticks;
  std::vector<loadgen::RequestRecord> records;
  loadgen::LoadStats load_stats;
  std::vector<AuditResult> audits;
  // One JSON object per line: {"t","pod","event","detail"}.
  std::vector<std::string> event_log;

  uint64_t admitted_total = 0;
  uint64_t denied_total = 0;
  uint64_t connection_errors = 0;
  int max_replicas_reached = 0;
  std::optional<Duration> time_to_max;
  // Earliest tick after which no request was denied during the load phase.
  std::optional<Duration> denial_free_onset;
  std::optional<Duration> settle_time;

  bool audits_passed() const;
};

// One run of the emulated service. Both modes drive the same handlers; only
// the executor and the transport differ.
class Experiment {
 public:
  Experiment(ScenarioConfig config, descriptors::DeploymentPlan plan);
  ~Experiment();
  Experiment(const Experiment&) = delete;
  Experiment& operator=(const Experiment&) = delete;

  // Runs to completion: load phase, then settling until the pool is back at
  // min replicas or the settle timeout passes.
  ExperimentResult run();

  // Simulated mode only: processes events up to `t` and stops there.
  void run_until(Timestamp t);

  Timestamp now() const;
  std::string render_table() const;
  std::string render_hpa_status() const;

  const sinkpool::Deployment& pool() const;
  const balancer::VirtualService& virtual_service() const;
  const autoscaler::HpaSpec& hpa_spec() const;
  const autoscaler::HpaStatus& hpa_status() const;
  const Controller& controller() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

// report.json.
std::string render_report(const ExperimentResult& result, const ScenarioConfig& config);

// trace.csv, loadstats.csv, report.json and events.jsonl into `dir`.
void write_outputs(const ExperimentResult& result, const ScenarioConfig& config,
                   const std::filesystem::path& dir);

}  // namespace scalepool::harness

#endif  // SCALEPOOL_HARNESS_EXPERIMENT_H_
