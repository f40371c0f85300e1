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

#include "scalepool/metrics/counter_series.h"

#include <algorithm>
#include <cmath>

#include "scalepool/common/errors.h"

namespace scalepool::metrics {

void CounterSeries::append(Timestamp t, double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw ContractViolation("counter value must be finite and non-negative");
  }
  if (!points_.empty()) {
    if (t < points_.back().t) {
      throw ContractViolation("counter point out of time order");
    }
    if (t == points_.back().t) {
      points_.back().value = value;
      return;
    }
  }
  points_.push_back(CounterPoint{t, value});
}

void CounterSeries::prune_before(Timestamp horizon) {
  const auto first_kept = std::find_if(points_.begin(), points_.end(),
                                       [horizon](const CounterPoint& p) { return p.t >= horizon; });
  points_.erase(points_.begin(), first_kept);
}

namespace {

auto window_bounds(std::span<const CounterPoint> points, Duration window, Timestamp now) {
  const Timestamp lo = now - window;
  auto first = std::lower_bound(points.begin(), points.end(), lo,
                                [](const CounterPoint& p, Timestamp t) { return p.t < t; });
  auto last = std::upper_bound(points.begin(), points.end(), now,
                               [](Timestamp t, const CounterPoint& p) { return t < p.t; });
  return std::pair{first, last};
}

}  // namespace

size_t points_in_window(const CounterSeries& series, Duration window, Timestamp now) {
  const auto [first, last] = window_bounds(series.points(), window, now);
  return static_cast<size_t>(last - first);
}

double window_rate(const CounterSeries& series, Duration window, Timestamp now) {
  if (window <= Duration::zero()) {
    throw ContractViolation("rate window must be positive");
  }
  const auto [first, last] = window_bounds(series.points(), window, now);
  if (last - first < 2) return 0.0;
  double increase = 0.0;
  for (auto it = first + 1; it != last; ++it) {
    const double prev = (it - 1)->value;
    increase += it->value >= prev ? it->value - prev : it->value;
  }
  return increase / to_seconds(window);
}

void SeriesStore::ingest(std::span<const Sample> samples) {
  for (const Sample& s : samples) {
    auto key = s.key();
    auto it = series_.find(key);
    if (it == series_.end()) {
      it = series_.emplace(key, CounterSeries(key)).first;
    }
    it->second.append(s.timestamp, s.value);
  }
}

const CounterSeries* SeriesStore::find(const SeriesKey& key) const {
  const auto it = series_.find(key);
  return it == series_.end() ? nullptr : &it->second;
}

void SeriesStore::prune_before(Timestamp horizon) {
  for (auto it = series_.begin(); it != series_.end();) {
    it->second.prune_before(horizon);
    it = it->second.empty() ? series_.erase(it) : std::next(it);
  }
}

}  // namespace scalepool::metrics
