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

#include "scalepool/common/time.h"

#include <cstdio>
#include <cstdlib>

namespace scalepool {

std::string format_seconds(int64_t ms) {
  const char* sign = ms < 0 ? "-" : "";
  const int64_t mag = std::llabs(ms);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%s%lld.%03lld", sign, static_cast<long long>(mag / 1000),
                static_cast<long long>(mag % 1000));
  return buf;
}

}  // namespace scalepool
