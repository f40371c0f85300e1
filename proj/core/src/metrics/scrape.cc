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

#include "scalepool/metrics/scrape.h"

#include <exception>

#include "scalepool/metrics/exposition.h"

namespace scalepool::metrics {

ScrapeResult scrape(std::span<const ScrapeTarget> targets, Timestamp now) {
  ScrapeResult result;
  for (const ScrapeTarget& target : targets) {
    std::vector<Sample> parsed;
    try {
      parsed = parse_exposition(target.fetch());
    } catch (const std::exception& e) {
      result.failures.push_back(ScrapeFailure{target.pod, e.what(), now});
      continue;
    }
    for (Sample& s : parsed) {
      s.timestamp = now;
      s.labels["pod"] = target.pod;
      result.samples.push_back(std::move(s));
    }
  }
  return result;
}

}  // namespace scalepool::metrics
