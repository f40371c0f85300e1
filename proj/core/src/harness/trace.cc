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

#include "scalepool/harness/trace.h"

#include "scalepool/common/errors.h"

namespace scalepool::harness {

void TraceRecorder::record(TraceRow row) {
  if (row.event.find(',') != std::string::npos) {
    throw ContractViolation("trace event must not contain commas");
  }
  if (!rows_.empty()) {
    TraceRow& last = rows_.back();
    if (row.t < last.t) throw ContractViolation("trace rows must not go back in time");
    if (row.t == last.t) {
      std::string event = last.event;
      if (!row.event.empty()) {
        if (!event.empty()) event += ';';
        event += row.event;
      }
      last = std::move(row);
      last.event = std::move(event);
      return;
    }
  }
  rows_.push_back(std::move(row));
}

std::string TraceRecorder::to_csv(Timestamp origin) const {
  std::string out(kTraceHeader);
  out += '\n';
  for (const TraceRow& r : rows_) {
    out += format_seconds(to_ms(r.t - origin));
    out += ',' + std::to_string(r.replicas_running) + ',' + std::to_string(r.replicas_desired) + ',';
    if (r.avg_metric) out += std::to_string(r.avg_metric->millis());
    out += ',' + std::to_string(r.admitted_total) + ',' + std::to_string(r.denied_total) + ',' +
           std::to_string(r.rps) + ',' + r.event + '\n';
  }
  return out;
}

bool has_event(const TraceRow& row, std::string_view token) {
  std::string_view rest = row.event;
  while (!rest.empty()) {
    const size_t cut = rest.find(';');
    const std::string_view item = rest.substr(0, cut);
    if (item == token) return true;
    if (cut == std::string_view::npos) break;
    rest.remove_prefix(cut + 1);
  }
  return false;
}

}  // namespace scalepool::harness
