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

#ifndef SCALEPOOL_AUTOSCALER_HPA_H_
#define SCALEPOOL_AUTOSCALER_HPA_H_

#include <deque>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scalepool/common/time.h"
#include "scalepool/metrics/counter_series.h"
#include "scalepool/metrics/milli.h"

namespace scalepool::autoscaler {

using metrics::MilliValue;

// Per-pod request rate over the rate window, derived from
// vsp_http_requests_total.
inline constexpr std::string_view kRequestRateMetric = "vsp_http_request_rate";
// Per-pod active stream gauge, used as-is.
inline constexpr std::string_view kActiveStreamsMetric = "vsp_active_streams";

struct HpaSpec {
  std::string name = "vsp";
  std::string target_deployment = "vsp";
  std::string metric_name = std::string(kRequestRateMetric);
  MilliValue target_average = MilliValue::from_units(1);
  int min_replicas = 1;
  int max_replicas = 10;
  // Relative dead band in millis of ratio: 100 is 0.1.
  MilliValue tolerance{100};
  Duration sync_period = std::chrono::seconds(15);
  Duration scale_down_stabilization = std::chrono::seconds(300);

  // Throws ContractViolation on a broken invariant or unknown metric.
  void validate() const;

  friend bool operator==(const HpaSpec&, const HpaSpec&) = default;
};

struct Recommendation {
  Timestamp t{};
  int replicas = 0;
};

struct HpaStatus {
  int current_replicas = 0;
  std::optional<MilliValue> current_average;
  int desired_replicas = 0;
  std::optional<Timestamp> last_scale_time;
  std::deque<Recommendation> recommendation_history;
};

struct PodMetric {
  std::string pod;
  double value = 0.0;
};

// Mean over pods that are ready and have a value, rounded half away from
// zero to millis. nullopt means no metrics: the tick is skipped.
std::optional<MilliValue> collect_average(std::span<const PodMetric> samples,
                                          const std::set<std::string, std::less<>>& ready_pods);

// `current` inside the dead band |avg - target| <= tolerance * target / 1000,
// otherwise ceil(current * avg / target). Exact integer arithmetic.
int compute_desired(int current, MilliValue avg, MilliValue target, MilliValue tolerance);

int clamp_replicas(int desired, int min_replicas, int max_replicas);

// Scale-up (proposed >= current) passes through. Scale-down returns the
// largest recommendation in [now - window, now], `proposed` included, never
// more than `current`.
int stabilize(const std::deque<Recommendation>& history, int proposed, int current, Timestamp now,
              Duration window);

// Resolves the spec's metric to one value per ready pod, reading scraped
// series. Rates need at least two points in the window; pods without data are
// left out rather than reported as zero.
std::vector<PodMetric> derive_pod_metrics(const metrics::SeriesStore& store,
                                          std::string_view metric_name,
                                          std::span<const std::string> pods, Duration rate_window,
                                          Timestamp now);

struct ScaleCommand {
  std::string deployment;
  int replicas = 0;

  friend bool operator==(const ScaleCommand&, const ScaleCommand&) = default;
};

// What one tick saw and decided; the harness turns this into a trace row.
struct TickReport {
  Timestamp t{};
  bool skipped = false;  // no metrics
  std::optional<MilliValue> average;
  int current = 0;
  int proposed = 0;    // compute_desired, clamped
  int stabilized = 0;  // after scale-down damping, clamped
  std::optional<ScaleCommand> command;
};

// One control-loop tick: collect_average -> compute_desired -> stabilize ->
// clamp. Emits a command iff the result differs from current replicas. The
// clamped compute_desired output goes into the recommendation history.
TickReport reconcile(const HpaSpec& spec, HpaStatus& status, std::span<const PodMetric> samples,
                     const std::set<std::string, std::less<>>& ready_pods, Timestamp now);

// Two-line status table shaped like `kubectl get hpa`.
std::string render_status(const HpaSpec& spec, const HpaStatus& status);
inline constexpr std::string_view kStatusHeader =
    "NAME\tREFERENCE\tTARGETS\tMINPODS\tMAXPODS\tREPLICAS";
std::string render_status_row(const HpaSpec& spec, const HpaStatus& status);

}  // namespace scalepool::autoscaler

#endif  // SCALEPOOL_AUTOSCALER_HPA_H_
