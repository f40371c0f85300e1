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

#include <fstream>

#include "json.hpp"
#include "scalepool/harness/experiment.h"

namespace scalepool::harness {

namespace {

using nlohmann::ordered_json;

ordered_json seconds_or_null(const std::optional<Duration>& d) {
  if (!d) return nullptr;
  return static_cast<double>(d->count()) / 1000.0;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ScenarioError("cannot write " + path.string());
  out << text;
  if (!out) throw ScenarioError("cannot write " + path.string());
}

}  // namespace

std::string render_report(const ExperimentResult& r, const ScenarioConfig& config) {
  ordered_json doc;
  doc["mode"] = std::string(to_string(r.mode));
  doc["seed"] = r.seed;
  doc["scheduler"] = std::string(balancer::to_string(r.scheduler));
  doc["capacity"] = r.capacity;
  doc["min_replicas"] = r.min_replicas;
  doc["max_replicas"] = r.max_replicas;
  doc["max_replicas_reached"] = r.max_replicas_reached;
  doc["time_to_max_s"] = seconds_or_null(r.time_to_max);
  doc["denial_free_onset_s"] = seconds_or_null(r.denial_free_onset);
  doc["settle_time_s"] = seconds_or_null(r.settle_time);
  doc["load_duration_s"] = static_cast<double>((r.load_end - r.load_start).count()) / 1000.0;
  doc["totals"] = {
      {"requests", r.records.size()},
      {"admitted", r.admitted_total},
      {"denied", r.denied_total},
      {"connection_errors", r.connection_errors},
      {"ticks", r.ticks.size()},
  };
  ordered_json audits = ordered_json::array();
  for (const auto& a : r.audits) {
    audits.push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
  }
  doc["audits"] = r.audits_passed() ? "pass" : "fail";
  doc["audit_details"] = audits;
  doc["config"] = ordered_json::parse(scenario_to_json(config));
  return doc.dump(2) + "\n";
}

void write_outputs(const ExperimentResult& result, const ScenarioConfig& config,
                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "trace.csv", result.trace.to_csv(result.load_start));
  write_text(dir / "loadstats.csv", loadgen::to_csv(result.load_stats));
  write_text(dir / "report.json", render_report(result, config));
  std::string events;
  for (const auto& line : result.event_log) events += line + "\n";
  write_text(dir / "events.jsonl", events);
}

}  // namespace scalepool::harness
