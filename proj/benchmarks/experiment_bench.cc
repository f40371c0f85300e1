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

#include "benchmark/benchmark.h"
#include "scalepool/harness/experiment.h"
#include "scalepool/harness/scenario.h"

namespace scalepool::harness {
namespace {

// Whole reference scenario on the logical clock.
void BM_SimulatedReferenceScenario(benchmark::State& state) {
  const ScenarioConfig config =
      load_scenario(std::filesystem::path(SCALEPOOL_SOURCE_DIR) / "scenarios/baseline.json");
  const auto plan = load_plan(config);
  size_t requests = 0;
  for (auto _ : state) {
    Experiment e(config, plan);
    const ExperimentResult r = e.run();
    requests = r.records.size();
    benchmark::DoNotOptimize(r.trace.rows().size());
  }
  state.counters["requests"] = static_cast<double>(requests);
}
BENCHMARK(BM_SimulatedReferenceScenario)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace scalepool::harness
