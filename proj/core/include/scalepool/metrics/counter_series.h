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

#ifndef SCALEPOOL_METRICS_COUNTER_SERIES_H_
#define SCALEPOOL_METRICS_COUNTER_SERIES_H_

#include <map>
#include <span>
#include <vector>

#include "scalepool/common/time.h"
#include "scalepool/metrics/sample.h"

namespace scalepool::metrics {

struct CounterPoint {
  Timestamp t;
  double value;
};

// Time-ordered cumulative values of one counter. A decrease between two
// points is a counter reset.
class CounterSeries {
 public:
  CounterSeries() = default;
  explicit CounterSeries(SeriesKey key) : key_(std::move(key)) {}

  // Throws ContractViolation when t precedes the last point or value < 0.
  // A point at the same timestamp as the last one replaces it.
  void append(Timestamp t, double value);

  // Drops points strictly older than `horizon`.
  void prune_before(Timestamp horizon);

  const SeriesKey& key() const { return key_; }
  std::span<const CounterPoint> points() const { return points_; }
  bool empty() const { return points_.empty(); }
  const CounterPoint& latest() const { return points_.back(); }

 private:
  SeriesKey key_;
  std::vector<CounterPoint> points_;
};

// Per-second increase over the points in [now - window, now], divided by the
// whole window. Resets contribute the post-reset value. Fewer than two points
// in the window gives 0.
double window_rate(const CounterSeries& series, Duration window, Timestamp now);

size_t points_in_window(const CounterSeries& series, Duration window, Timestamp now);

// Scraped samples, appended per series. This is the scraper's side of the
// pipeline; gauges go through the same store and are read with latest().
class SeriesStore {
 public:
  void ingest(std::span<const Sample> samples);
  const CounterSeries* find(const SeriesKey& key) const;
  void prune_before(Timestamp horizon);
  size_t size() const { return series_.size(); }

 private:
  std::map<SeriesKey, CounterSeries> series_;
};

}  // namespace scalepool::metrics

#endif  // SCALEPOOL_METRICS_COUNTER_SERIES_H_
