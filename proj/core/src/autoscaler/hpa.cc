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

#include "scalepool/autoscaler/hpa.h"

#include <algorithm>

#include "scalepool/common/errors.h"
#include "scalepool/sinkpool/pod.h"

namespace scalepool::autoscaler {

namespace {

__extension__ typedef __int128 i128;

i128 abs128(i128 v) { return v < 0 ? -v : v; }

// Ceiling of num/den for den > 0, any sign of num.
i128 ceil_div(i128 num, i128 den) {
  const i128 q = num / den;
  return (num % den != 0 && num > 0) ? q + 1 : q;
}

}  // namespace

void HpaSpec::validate() const {
  if (target_average.millis() <= 0) throw ContractViolation("HPA target must be positive");
  if (min_replicas < 1) throw ContractViolation("HPA min_replicas must be at least 1");
  if (max_replicas < min_replicas) throw ContractViolation("HPA max_replicas below min_replicas");
  if (tolerance.millis() < 0) throw ContractViolation("HPA tolerance must be non-negative");
  if (sync_period <= Duration::zero()) throw ContractViolation("HPA sync period must be positive");
  if (scale_down_stabilization < Duration::zero()) {
    throw ContractViolation("HPA stabilization window must be non-negative");
  }
  if (metric_name != kRequestRateMetric && metric_name != kActiveStreamsMetric) {
    throw ContractViolation("unknown HPA metric '" + metric_name + "'");
  }
}

std::optional<MilliValue> collect_average(std::span<const PodMetric> samples,
                                          const std::set<std::string, std::less<>>& ready_pods) {
  double sum = 0.0;
  int n = 0;
  std::set<std::string_view> seen;
  for (const PodMetric& m : samples) {
    if (!ready_pods.contains(m.pod) || !seen.insert(m.pod).second) continue;
    sum += m.value;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return metrics::milli_from_real(sum / n);
}

int compute_desired(int current, MilliValue avg, MilliValue target, MilliValue tolerance) {
  if (target.millis() <= 0) throw ContractViolation("target must be positive");
  const i128 a = avg.millis();
  const i128 t = target.millis();
  if (abs128(a - t) * 1000 <= static_cast<i128>(tolerance.millis()) * t) {
    return current;
  }
  const i128 desired = ceil_div(static_cast<i128>(current) * a, t);
  return static_cast<int>(std::clamp<i128>(desired, 0, 1'000'000'000));
}

int clamp_replicas(int desired, int min_replicas, int max_replicas) {
  return std::min(std::max(desired, min_replicas), max_replicas);
}

int stabilize(const std::deque<Recommendation>& history, int proposed, int current, Timestamp now,
              Duration window) {
  if (proposed >= current) return proposed;
  int best = proposed;
  for (const Recommendation& r : history) {
    if (r.t >= now - window && r.t <= now) best = std::max(best, r.replicas);
  }
  return std::min(best, current);
}

std::vector<PodMetric> derive_pod_metrics(const metrics::SeriesStore& store,
                                          std::string_view metric_name,
                                          std::span<const std::string> pods, Duration rate_window,
                                          Timestamp now) {
  std::vector<PodMetric> out;
  for (const std::string& pod : pods) {
    const metrics::Labels labels{{"pod", pod}};
    if (metric_name == kRequestRateMetric) {
      const auto* series =
          store.find(metrics::SeriesKey{std::string(sinkpool::kRequestsMetric), labels});
      if (series == nullptr || metrics::points_in_window(*series, rate_window, now) < 2) continue;
      out.push_back({pod, metrics::window_rate(*series, rate_window, now)});
    } else if (metric_name == kActiveStreamsMetric) {
      const auto* series =
          store.find(metrics::SeriesKey{std::string(sinkpool::kActiveStreamsMetric), labels});
      if (series == nullptr || series->empty()) continue;
      out.push_back({pod, series->latest().value});
    } else {
      throw ContractViolation("unknown HPA metric '" + std::string(metric_name) + "'");
    }
  }
  return out;
}

TickReport reconcile(const HpaSpec& spec, HpaStatus& status, std::span<const PodMetric> samples,
                     const std::set<std::string, std::less<>>& ready_pods, Timestamp now) {
  TickReport report;
  report.t = now;
  report.current = status.current_replicas;

  // History older than the window can never matter again.
  while (!status.recommendation_history.empty() &&
         status.recommendation_history.front().t < now - spec.scale_down_stabilization) {
    status.recommendation_history.pop_front();
  }

  const auto avg = collect_average(samples, ready_pods);
  status.current_average = avg;
  if (!avg) {
    report.skipped = true;
    report.proposed = report.stabilized = status.current_replicas;
    status.desired_replicas = status.current_replicas;
    return report;
  }
  report.average = avg;

  const int raw = compute_desired(status.current_replicas, *avg, spec.target_average, spec.tolerance);
  report.proposed = clamp_replicas(raw, spec.min_replicas, spec.max_replicas);
  const int damped = stabilize(status.recommendation_history, report.proposed,
                               status.current_replicas, now, spec.scale_down_stabilization);
  report.stabilized = clamp_replicas(damped, spec.min_replicas, spec.max_replicas);
  status.recommendation_history.push_back({now, report.proposed});
  status.desired_replicas = report.stabilized;

  if (report.stabilized != status.current_replicas) {
    report.command = ScaleCommand{spec.target_deployment, report.stabilized};
    status.current_replicas = report.stabilized;
    status.last_scale_time = now;
  }
  return report;
}

std::string render_status_row(const HpaSpec& spec, const HpaStatus& status) {
  const std::string observed =
      status.current_average ? metrics::render_milli(*status.current_average) : "<unknown>";
  return spec.name + "\tDeployment/" + spec.target_deployment + "\t" + observed + "/" +
         metrics::render_milli(spec.target_average) + "\t" + std::to_string(spec.min_replicas) +
         "\t" + std::to_string(spec.max_replicas) + "\t" + std::to_string(status.current_replicas);
}

std::string render_status(const HpaSpec& spec, const HpaStatus& status) {
  return std::string(kStatusHeader) + "\n" + render_status_row(spec, status) + "\n";
}

}  // namespace scalepool::autoscaler
