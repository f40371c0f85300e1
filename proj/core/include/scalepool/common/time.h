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

#ifndef SCALEPOOL_COMMON_TIME_H_
#define SCALEPOOL_COMMON_TIME_H_

#include <chrono>
#include <cstdint>
#include <string>

namespace scalepool {

// Experiment time. Millisecond resolution, zero at experiment start. The
// clock has no now(): time is always supplied by an Executor.
struct ExperimentClock {
  using rep = int64_t;
  using period = std::milli;
  using duration = std::chrono::duration<rep, period>;
  using time_point = std::chrono::time_point<ExperimentClock>;
  static constexpr bool is_steady = true;
};

using Duration = ExperimentClock::duration;
using Timestamp = ExperimentClock::time_point;

constexpr Timestamp at_ms(int64_t ms) { return Timestamp(Duration(ms)); }
constexpr int64_t to_ms(Timestamp t) { return t.time_since_epoch().count(); }
constexpr int64_t to_ms(Duration d) { return d.count(); }

inline double to_seconds(Duration d) { return static_cast<double>(d.count()) / 1000.0; }

// "12.345": fixed three decimals, exact for millisecond inputs.
std::string format_seconds(int64_t ms);
inline std::string format_seconds(Timestamp t) { return format_seconds(to_ms(t)); }

}  // namespace scalepool

#endif  // SCALEPOOL_COMMON_TIME_H_
