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

#ifndef SCALEPOOL_METRICS_SAMPLE_H_
#define SCALEPOOL_METRICS_SAMPLE_H_

#include <compare>
#include <map>
#include <string>
#include <string_view>

#include "scalepool/common/time.h"

namespace scalepool::metrics {

using Labels = std::map<std::string, std::string>;

// Identity of one time series.
struct SeriesKey {
  std::string name;
  Labels labels;

  friend auto operator<=>(const SeriesKey&, const SeriesKey&) = default;
};

struct Sample {
  std::string name;
  Labels labels;
  double value = 0.0;
  Timestamp timestamp{};

  SeriesKey key() const { return SeriesKey{name, labels}; }
};

// [a-zA-Z_:][a-zA-Z0-9_:]*
bool valid_metric_name(std::string_view name);
// [a-zA-Z_][a-zA-Z0-9_]*
bool valid_label_name(std::string_view name);

}  // namespace scalepool::metrics

#endif  // SCALEPOOL_METRICS_SAMPLE_H_
