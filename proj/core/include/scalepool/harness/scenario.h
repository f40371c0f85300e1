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

#ifndef SCALEPOOL_HARNESS_SCENARIO_H_
#define SCALEPOOL_HARNESS_SCENARIO_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scalepool/balancer/virtual_service.h"
#include "scalepool/common/errors.h"
#include "scalepool/common/time.h"
#include "scalepool/descriptors/descriptors.h"
#include "scalepool/loadgen/loadgen.h"
#include "scalepool/metrics/milli.h"

namespace scalepool::harness {

class ScenarioError : public Error {
 public:
  using Error::Error;
};

enum class Mode { kSimulated, kRealTime };

std::string_view to_string(Mode m);

// A descriptor given either as a file path or inline JSON.
struct DescriptorSource {
  std::filesystem::path path;
  std::string inline_json;
};

// Simulated response time of one upload, in microseconds:
// base + per_stream * (streams on the pod) + uniform[0, jitter].
struct LatencyModel {
  loadgen::Latency base{3000};
  loadgen::Latency per_stream{250};
  loadgen::Latency jitter{2000};
};

struct Overrides {
  std::optional<Duration> sync_period;
  std::optional<Duration> stabilization;
  std::optional<metrics::MilliValue> tolerance;
  std::optional<metrics::MilliValue> target;
  std::optional<int> min_replicas;
  std::optional<int> max_replicas;
  std::optional<std::string> metric;
  std::optional<int> capacity;
  std::optional<balancer::Scheduler> scheduler;
  std::optional<std::string> listen_addr;
};

struct ScenarioConfig {
  Mode mode = Mode::kSimulated;
  std::optional<uint64_t> seed;
  loadgen::LoadProfile profile;
  std::vector<DescriptorSource> vnfds;
  DescriptorSource nsd;
  Overrides overrides;
  std::filesystem::path output_dir;
  Duration rate_window = std::chrono::seconds(30);
  Duration scrape_interval = std::chrono::seconds(5);
  // Default: stabilization + 4 sync periods after load end.
  std::optional<Duration> settle_timeout;
  LatencyModel latency;
  // Real-time mode binds every listener on this host.
  std::string bind_host = "127.0.0.1";
  // Real-time controller port; 0 picks a free one.
  int controller_port = 0;

  // Throws ScenarioError.
  void validate() const;
};

// Parses a scenario document; relative descriptor paths resolve against
// base_dir. Missing fields keep their defaults. Throws ScenarioError.
ScenarioConfig parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir);
ScenarioConfig load_scenario(const std::filesystem::path& file);

// Canonical JSON echo of the effective configuration.
std::string scenario_to_json(const ScenarioConfig& config);

// Reads and compiles the descriptors, then applies the overrides.
// Throws descriptors::DescriptorError or ScenarioError.
descriptors::DeploymentPlan load_plan(const ScenarioConfig& config);

std::string read_file(const std::filesystem::path& path);

}  // namespace scalepool::harness

#endif  // SCALEPOOL_HARNESS_SCENARIO_H_
