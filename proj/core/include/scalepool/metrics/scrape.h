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

#ifndef SCALEPOOL_METRICS_SCRAPE_H_
#define SCALEPOOL_METRICS_SCRAPE_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "scalepool/common/time.h"
#include "scalepool/metrics/sample.h"

namespace scalepool::metrics {

// One pod's exposition endpoint. `fetch` returns the exposition body and
// throws on any transport failure. In simulated mode it encodes the pod's
// registry in memory; in real-time mode it does an HTTP GET /metrics.
struct ScrapeTarget {
  std::string pod;
  std::function<std::string()> fetch;
};

struct ScrapeFailure {
  std::string pod;
  std::string reason;
  Timestamp at{};
};

struct ScrapeResult {
  std::vector<Sample> samples;
  std::vector<ScrapeFailure> failures;
};

// Samples are stamped with `now` and a `pod` label. A target that fails to
// fetch or parse contributes a failure instead of samples.
ScrapeResult scrape(std::span<const ScrapeTarget> targets, Timestamp now);

}  // namespace scalepool::metrics

#endif  // SCALEPOOL_METRICS_SCRAPE_H_
