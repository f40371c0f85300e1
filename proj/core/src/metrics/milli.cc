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

#include "scalepool/metrics/milli.h"

#include <charconv>
#include <cmath>
#include <limits>

#include "scalepool/common/errors.h"

namespace scalepool::metrics {

MilliValue parse_milli(std::string_view text) {
  const std::string token(text);
  if (text.empty()) {
    throw FormatError(token, "empty milli value");
  }
  bool milli_suffix = false;
  std::string_view digits = text;
  if (digits.back() == 'm') {
    milli_suffix = true;
    digits.remove_suffix(1);
  }
  // from_chars rejects a leading '+', which is what we want.
  if (digits.empty() || (digits.size() == 1 && digits[0] == '-')) {
    throw FormatError(token, "missing digits in milli value");
  }
  int64_t n = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
  if (ec == std::errc::result_out_of_range) {
    throw FormatError(token, "milli value out of range");
  }
  if (ec != std::errc() || ptr != digits.data() + digits.size()) {
    throw FormatError(token, "malformed milli value");
  }
  if (milli_suffix) {
    return MilliValue(n);
  }
  int64_t millis = 0;
  if (__builtin_mul_overflow(n, int64_t{1000}, &millis)) {
    throw FormatError(token, "milli value out of range");
  }
  return MilliValue(millis);
}

std::string render_milli(MilliValue v) {
  if (v.millis() % 1000 == 0) {
    return std::to_string(v.millis() / 1000);
  }
  return std::to_string(v.millis()) + "m";
}

MilliValue milli_from_real(double units) {
  const double scaled = units * 1000.0;
  if (!std::isfinite(scaled) || std::fabs(scaled) >= 9.2e18) {
    throw ContractViolation("metric value not representable in millis");
  }
  return MilliValue(std::llround(scaled));
}

}  // namespace scalepool::metrics
