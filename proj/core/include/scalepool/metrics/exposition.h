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

#ifndef SCALEPOOL_METRICS_EXPOSITION_H_
#define SCALEPOOL_METRICS_EXPOSITION_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scalepool/metrics/registry.h"
#include "scalepool/metrics/sample.h"

namespace scalepool::metrics {

inline constexpr std::string_view kExpositionContentType = "text/plain; version=0.0.4";

// Plain-text exposition: one `name{a="x",b="y"} value` line per series,
// sorted by (name, labels), values in shortest round-trip decimal.
std::string encode_exposition(const Registry& registry);
std::string encode_exposition(std::span<const Sample> samples);

// Inverse of encode_exposition. Skips blank and '#' lines; accepts an
// optional trailing integer timestamp (milliseconds). Throws ParseError.
std::vector<Sample> parse_exposition(std::string_view text);

// Shortest decimal that parses back to the same double; NaN and +/-Inf are
// spelled the way the format expects.
std::string format_value(double v);

}  // namespace scalepool::metrics

#endif  // SCALEPOOL_METRICS_EXPOSITION_H_
