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

#ifndef SCALEPOOL_HARNESS_TRACE_H_
#define SCALEPOOL_HARNESS_TRACE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scalepool/common/time.h"
#include "scalepool/metrics/milli.h"

namespace scalepool::harness {

struct TraceRow {
  Timestamp t{};
  int replicas_running = 0;
  int replicas_desired = 0;
  std::optional<metrics::MilliValue> avg_metric;
  uint64_t admitted_total = 0;
  uint64_t denied_total = 0;
  int rps = 0;
  // ';'-separated tokens such as "tick", "scale_to:4", "running:<pod>".
  std::string event;
};

// Time series of the pool state. Rows that share a timestamp collapse into
// one: the later snapshot wins and the events are joined.
class TraceRecorder {
 public:
  // Throws ContractViolation if row.t is earlier than the last row.
  void record(TraceRow row);

  const std::vector<TraceRow>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }

  // trace.csv. Times are seconds relative to `origin`, 3 decimals.
  std::string to_csv(Timestamp origin = Timestamp{}) const;

 private:
  std::vector<TraceRow> rows_;
};

inline constexpr std::string_view kTraceHeader =
    "t,replicas_running,replicas_desired,avg_metric_millis,admitted_total,denied_total,rps,event";

bool has_event(const TraceRow& row, std::string_view token);

}  // namespace scalepool::harness

#endif  // SCALEPOOL_HARNESS_TRACE_H_
