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

#ifndef SCALEPOOL_METRICS_REGISTRY_H_
#define SCALEPOOL_METRICS_REGISTRY_H_

#include <map>
#include <mutex>
#include <optional>
#include <string_view>
#include <vector>

#include "scalepool/common/time.h"
#include "scalepool/metrics/sample.h"

namespace scalepool::metrics {

enum class MetricKind { kCounter, kGauge };

// Counters and gauges keyed by name+labels. Safe for concurrent writers;
// snapshot() takes the lock once so readers never see a half-applied update.
class Registry {
 public:
  struct Entry {
    SeriesKey key;
    MetricKind kind = MetricKind::kCounter;
    double value = 0.0;
    Timestamp updated{};
  };

  Registry() = default;
  Registry(const Registry&) = delete;
  Registry& operator=(const Registry&) = delete;

  // Throws ContractViolation for a negative or non-finite amount, an invalid
  // name, or a key already registered as a gauge.
  void increment_counter(std::string_view name, const Labels& labels, double amount, Timestamp now);
  void set_gauge(std::string_view name, const Labels& labels, double value, Timestamp now);

  std::optional<double> value(std::string_view name, const Labels& labels) const;

  // Sorted by (name, labels).
  std::vector<Entry> snapshot() const;

  size_t size() const;

 private:
  struct Cell {
    MetricKind kind;
    double value;
    Timestamp updated;
  };

  Cell& cell_locked(std::string_view name, const Labels& labels, MetricKind kind);

  mutable std::mutex mu_;
  std::map<SeriesKey, Cell> series_;
};

}  // namespace scalepool::metrics

#endif  // SCALEPOOL_METRICS_REGISTRY_H_
