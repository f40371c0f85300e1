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

#include "scalepool/harness/scenario.h"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace scalepool::harness {

namespace {

using nlohmann::json;

int64_t get_int(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ScenarioError(where + "." + key + ": expected an integer");
  return v.get<int64_t>();
}

double get_number(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw ScenarioError(where + "." + key + ": expected a number");
  return v.get<double>();
}

std::string get_string(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_string()) throw ScenarioError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

metrics::MilliValue get_milli(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  try {
    if (v.is_number_integer()) return metrics::MilliValue::from_units(v.get<int64_t>());
    if (v.is_string()) return metrics::parse_milli(v.get<std::string>());
  } catch (const FormatError& e) {
    throw ScenarioError(where + "." + key + ": " + e.what());
  }
  throw ScenarioError(where + "." + key + ": expected a milli value such as \"100m\"");
}

DescriptorSource get_source(const json& v, const std::filesystem::path& base_dir,
                            const std::string& where) {
  DescriptorSource src;
  if (v.is_string()) {
    std::filesystem::path p = v.get<std::string>();
    src.path = p.is_absolute() ? p : base_dir / p;
  } else if (v.is_object()) {
    src.inline_json = v.dump();
  } else {
    throw ScenarioError(where + ": expected a file path or an inline descriptor object");
  }
  return src;
}

std::string source_text(const DescriptorSource& src) {
  return src.inline_json.empty() ? read_file(src.path) : src.inline_json;
}

std::string source_name(const DescriptorSource& src) {
  return src.inline_json.empty() ? src.path.string() : "<inline>";
}

}  // namespace

std::string_view to_string(Mode m) { return m == Mode::kRealTime ? "realtime" : "simulated"; }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ScenarioConfig::validate() const {
  if (mode == Mode::kSimulated && !seed) {
    throw ScenarioError("simulated mode requires a seed");
  }
  try {
    profile.validate();
  } catch (const ContractViolation& e) {
    throw ScenarioError(std::string("profile: ") + e.what());
  }
  if (vnfds.empty()) throw ScenarioError("descriptors.vnfds: at least one VNFD is required");
  if (nsd.path.empty() && nsd.inline_json.empty()) throw ScenarioError("descriptors.nsd is required");
  if (rate_window <= Duration::zero()) throw ScenarioError("metrics.rate_window_ms must be positive");
  if (scrape_interval <= Duration::zero()) {
    throw ScenarioError("metrics.scrape_interval_ms must be positive");
  }
  if (controller_port < 0 || controller_port > 65535) {
    throw ScenarioError("controller_port must be in [0, 65535]");
  }
  if (settle_timeout && *settle_timeout < Duration::zero()) {
    throw ScenarioError("settle_timeout_ms must be non-negative");
  }
}

ScenarioConfig parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir) {
  const json doc = json::parse(json_text.begin(), json_text.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ScenarioError("scenario is not a JSON object");
  }
  ScenarioConfig c;
  try {
    if (doc.contains("mode")) {
      const std::string mode = get_string(doc, "mode", "$");
      if (mode == "simulated") c.mode = Mode::kSimulated;
      else if (mode == "realtime") c.mode = Mode::kRealTime;
      else throw ScenarioError("$.mode: expected \"simulated\" or \"realtime\"");
    }
    if (doc.contains("seed")) {
      const json& s = doc["seed"];
      if (!s.is_number_integer()) throw ScenarioError("$.seed: expected an integer");
      c.seed = s.is_number_unsigned() ? s.get<uint64_t>() : static_cast<uint64_t>(s.get<int64_t>());
    }
    if (doc.contains("output_dir")) c.output_dir = get_string(doc, "output_dir", "$");

    if (doc.contains("profile")) {
      const json& p = doc["profile"];
      const std::string w = "$.profile";
      if (p.contains("users")) c.profile.target_users = static_cast<int>(get_int(p, "users", w));
      if (p.contains("hatch_rate")) c.profile.hatch_rate = get_number(p, "hatch_rate", w);
      if (p.contains("stream_hold_ms")) {
        const json& h = p["stream_hold_ms"];
        if (h.is_number_integer()) {
          c.profile.stream_hold_min = c.profile.stream_hold_max = Duration(h.get<int64_t>());
        } else if (h.is_array() && h.size() == 2 && h[0].is_number_integer() &&
                   h[1].is_number_integer()) {
          c.profile.stream_hold_min = Duration(h[0].get<int64_t>());
          c.profile.stream_hold_max = Duration(h[1].get<int64_t>());
        } else {
          throw ScenarioError(w + ".stream_hold_ms: expected an integer or [min, max]");
        }
      }
      if (p.contains("think_time_ms")) c.profile.think_time = Duration(get_int(p, "think_time_ms", w));
      if (p.contains("run_duration_ms")) {
        c.profile.run_duration = Duration(get_int(p, "run_duration_ms", w));
      }
    }

    if (!doc.contains("descriptors")) throw ScenarioError("$.descriptors is required");
    const json& d = doc["descriptors"];
    if (!d.is_object() || !d.contains("vnfds") || !d["vnfds"].is_array() || !d.contains("nsd")) {
      throw ScenarioError("$.descriptors: expected {\"vnfds\": [...], \"nsd\": ...}");
    }
    for (size_t i = 0; i < d["vnfds"].size(); ++i) {
      c.vnfds.push_back(
          get_source(d["vnfds"][i], base_dir, "$.descriptors.vnfds[" + std::to_string(i) + "]"));
    }
    c.nsd = get_source(d["nsd"], base_dir, "$.descriptors.nsd");

    if (doc.contains("overrides")) {
      const json& o = doc["overrides"];
      const std::string w = "$.overrides";
      if (o.contains("sync_period_ms")) c.overrides.sync_period = Duration(get_int(o, "sync_period_ms", w));
      if (o.contains("stabilization_ms")) {
        c.overrides.stabilization = Duration(get_int(o, "stabilization_ms", w));
      }
      if (o.contains("tolerance")) c.overrides.tolerance = get_milli(o, "tolerance", w);
      if (o.contains("target")) c.overrides.target = get_milli(o, "target", w);
      if (o.contains("min_replicas")) c.overrides.min_replicas = static_cast<int>(get_int(o, "min_replicas", w));
      if (o.contains("max_replicas")) c.overrides.max_replicas = static_cast<int>(get_int(o, "max_replicas", w));
      if (o.contains("metric")) c.overrides.metric = get_string(o, "metric", w);
      if (o.contains("capacity")) c.overrides.capacity = static_cast<int>(get_int(o, "capacity", w));
      if (o.contains("scheduler")) {
        try {
          c.overrides.scheduler = balancer::parse_scheduler(get_string(o, "scheduler", w));
        } catch (const ContractViolation& e) {
          throw ScenarioError(w + ".scheduler: " + e.what());
        }
      }
      if (o.contains("listen_addr")) c.overrides.listen_addr = get_string(o, "listen_addr", w);
    }

    if (doc.contains("metrics")) {
      const json& m = doc["metrics"];
      if (m.contains("rate_window_ms")) c.rate_window = Duration(get_int(m, "rate_window_ms", "$.metrics"));
      if (m.contains("scrape_interval_ms")) {
        c.scrape_interval = Duration(get_int(m, "scrape_interval_ms", "$.metrics"));
      }
    }
    if (doc.contains("latency")) {
      const json& l = doc["latency"];
      if (l.contains("base_us")) c.latency.base = loadgen::Latency(get_int(l, "base_us", "$.latency"));
      if (l.contains("per_stream_us")) {
        c.latency.per_stream = loadgen::Latency(get_int(l, "per_stream_us", "$.latency"));
      }
      if (l.contains("jitter_us")) c.latency.jitter = loadgen::Latency(get_int(l, "jitter_us", "$.latency"));
    }
    if (doc.contains("settle_timeout_ms")) c.settle_timeout = Duration(get_int(doc, "settle_timeout_ms", "$"));
    if (doc.contains("bind_host")) c.bind_host = get_string(doc, "bind_host", "$");
    if (doc.contains("controller_port")) {
      c.controller_port = static_cast<int>(get_int(doc, "controller_port", "$"));
    }
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  }
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& file) {
  return parse_scenario(read_file(file), file.parent_path());
}

std::string scenario_to_json(const ScenarioConfig& c) {
  json doc;
  doc["mode"] = std::string(to_string(c.mode));
  if (c.seed) doc["seed"] = *c.seed;
  doc["profile"] = {
      {"users", c.profile.target_users},
      {"hatch_rate", c.profile.hatch_rate},
      {"stream_hold_ms", {to_ms(c.profile.stream_hold_min), to_ms(c.profile.stream_hold_max)}},
      {"think_time_ms", to_ms(c.profile.think_time)},
      {"run_duration_ms", to_ms(c.profile.run_duration)},
  };
  json vnfds = json::array();
  for (const auto& v : c.vnfds) vnfds.push_back(source_name(v));
  doc["descriptors"] = {{"vnfds", vnfds}, {"nsd", source_name(c.nsd)}};
  json o = json::object();
  if (c.overrides.sync_period) o["sync_period_ms"] = to_ms(*c.overrides.sync_period);
  if (c.overrides.stabilization) o["stabilization_ms"] = to_ms(*c.overrides.stabilization);
  if (c.overrides.tolerance) o["tolerance"] = metrics::render_milli(*c.overrides.tolerance);
  if (c.overrides.target) o["target"] = metrics::render_milli(*c.overrides.target);
  if (c.overrides.min_replicas) o["min_replicas"] = *c.overrides.min_replicas;
  if (c.overrides.max_replicas) o["max_replicas"] = *c.overrides.max_replicas;
  if (c.overrides.metric) o["metric"] = *c.overrides.metric;
  if (c.overrides.capacity) o["capacity"] = *c.overrides.capacity;
  if (c.overrides.scheduler) o["scheduler"] = std::string(balancer::to_string(*c.overrides.scheduler));
  if (c.overrides.listen_addr) o["listen_addr"] = *c.overrides.listen_addr;
  doc["overrides"] = o;
  doc["metrics"] = {{"rate_window_ms", to_ms(c.rate_window)},
                    {"scrape_interval_ms", to_ms(c.scrape_interval)}};
  doc["latency"] = {{"base_us", c.latency.base.count()},
                    {"per_stream_us", c.latency.per_stream.count()},
                    {"jitter_us", c.latency.jitter.count()}};
  if (c.settle_timeout) doc["settle_timeout_ms"] = to_ms(*c.settle_timeout);
  if (c.mode == Mode::kRealTime) {
    doc["bind_host"] = c.bind_host;
    doc["controller_port"] = c.controller_port;
  }
  return doc.dump();
}

descriptors::DeploymentPlan load_plan(const ScenarioConfig& config) {
  std::vector<descriptors::VnfDescriptor> vnfds;
  for (const auto& src : config.vnfds) vnfds.push_back(descriptors::parse_vnfd(source_text(src)));
  const auto nsd = descriptors::parse_nsd(source_text(config.nsd));
  descriptors::DeploymentPlan plan = descriptors::compile_plan(nsd, vnfds);

  const Overrides& o = config.overrides;
  if (o.scheduler) plan.virtual_service.scheduler = *o.scheduler;
  if (o.listen_addr) plan.virtual_service.listen_addr = *o.listen_addr;
  for (auto& d : plan.deployments) {
    if (o.capacity) d.pod.capacity = *o.capacity;
  }
  for (auto& h : plan.hpas) {
    if (o.sync_period) h.sync_period = *o.sync_period;
    if (o.stabilization) h.scale_down_stabilization = *o.stabilization;
    if (o.tolerance) h.tolerance = *o.tolerance;
    if (o.target) h.target_average = *o.target;
    if (o.min_replicas) h.min_replicas = *o.min_replicas;
    if (o.max_replicas) h.max_replicas = *o.max_replicas;
    if (o.metric) h.metric_name = *o.metric;
    try {
      h.validate();
    } catch (const ContractViolation& e) {
      throw ScenarioError(std::string("overrides: ") + e.what());
    }
    for (auto& d : plan.deployments) {
      if (d.name == h.target_deployment) d.initial_replicas = h.min_replicas;
    }
  }
  for (const auto& d : plan.deployments) {
    if (d.pod.capacity < 1) throw ScenarioError("overrides.capacity must be positive");
  }
  return plan;
}

}  // namespace scalepool::harness
