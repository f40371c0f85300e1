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

#ifndef SCALEPOOL_METRICS_MILLI_H_
#define SCALEPOOL_METRICS_MILLI_H_

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace scalepool::metrics {

// Thousandths of a metric unit, the "m" suffix in autoscaler output
// ("2913m" is 2.913). Replica arithmetic stays on these integers.
class MilliValue {
 public:
  constexpr MilliValue() = default;
  constexpr explicit MilliValue(int64_t millis) : millis_(millis) {}

  static constexpr MilliValue from_units(int64_t units) { return MilliValue(units * 1000); }

  constexpr int64_t millis() const { return millis_; }

  friend constexpr auto operator<=>(MilliValue, MilliValue) = default;

 private:
  int64_t millis_ = 0;
};

// Accepts "<integer>" (whole units) or "<integer>m". Throws FormatError.
MilliValue parse_milli(std::string_view text);

// "942m", "2", "0". parse_milli(render_milli(v)) == v.
std::string render_milli(MilliValue v);

// Rounds half away from zero. Non-finite input throws ContractViolation.
MilliValue milli_from_real(double units);

inline double to_real(MilliValue v) { return static_cast<double>(v.millis()) / 1000.0; }

}  // namespace scalepool::metrics

#endif  // SCALEPOOL_METRICS_MILLI_H_
