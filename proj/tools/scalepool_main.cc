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

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "httplib.h"
#include "scalepool/common/errors.h"
#include "scalepool/descriptors/descriptors.h"
#include "scalepool/harness/experiment.h"
#include "scalepool/harness/scenario.h"

namespace {

using namespace scalepool;
using harness::ScenarioConfig;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDescriptor = 2;
constexpr int kExitAudit = 3;

struct RunFlags {
  std::string scenario;
  std::optional<uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::string> output_dir;
  std::optional<int64_t> sync_period_ms;
  std::optional<int64_t> stabilization_ms;
  std::optional<std::string> tolerance;
  std::optional<int> capacity;
  std::optional<std::string> scheduler;
  std::optional<int> users;
  std::optional<double> hatch_rate;
  std::optional<int64_t> duration_ms;
  std::optional<int> controller_port;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("scenario", f.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "RNG seed");
  cmd->add_option("--mode", f.mode, "simulated or realtime")
      ->check(CLI::IsMember({"simulated", "realtime"}));
  cmd->add_option("--output-dir", f.output_dir, "Where trace.csv and friends go");
  cmd->add_option("--sync-period-ms", f.sync_period_ms, "Autoscaler tick period");
  cmd->add_option("--stabilization-ms", f.stabilization_ms, "Scale-down stabilization window");
  cmd->add_option("--tolerance", f.tolerance, "Dead band as a milli ratio, e.g. 100m");
  cmd->add_option("--capacity", f.capacity, "Streams per pod");
  cmd->add_option("--scheduler", f.scheduler, "rr, wrr or lc")->check(CLI::IsMember({"rr", "wrr", "lc"}));
  cmd->add_option("--users", f.users, "Target user count");
  cmd->add_option("--hatch-rate", f.hatch_rate, "Users spawned per second");
  cmd->add_option("--duration-ms", f.duration_ms, "Load phase length");
  cmd->add_option("--controller-port", f.controller_port, "Real-time controller port (0: any free port)");
}

// Flags > SCALEPOOL_OUTPUT_DIR > file > defaults.
ScenarioConfig effective_config(const RunFlags& f) {
  ScenarioConfig c = harness::load_scenario(f.scenario);
  if (const char* env = std::getenv("SCALEPOOL_OUTPUT_DIR"); env != nullptr && *env != '\0') {
    c.output_dir = env;
  }
  if (f.seed) c.seed = *f.seed;
  if (f.mode) c.mode = *f.mode == "realtime" ? harness::Mode::kRealTime : harness::Mode::kSimulated;
  if (f.output_dir) c.output_dir = *f.output_dir;
  if (f.sync_period_ms) c.overrides.sync_period = Duration(*f.sync_period_ms);
  if (f.stabilization_ms) c.overrides.stabilization = Duration(*f.stabilization_ms);
  if (f.tolerance) {
    try {
      c.overrides.tolerance = metrics::parse_milli(*f.tolerance);
    } catch (const FormatError& e) {
      throw harness::ScenarioError(std::string("--tolerance: ") + e.what());
    }
  }
  if (f.capacity) c.overrides.capacity = *f.capacity;
  if (f.scheduler) c.overrides.scheduler = balancer::parse_scheduler(*f.scheduler);
  if (f.users) c.profile.target_users = *f.users;
  if (f.hatch_rate) c.profile.hatch_rate = *f.hatch_rate;
  if (f.duration_ms) c.profile.run_duration = Duration(*f.duration_ms);
  if (f.controller_port) c.controller_port = *f.controller_port;
  if (c.output_dir.empty()) c.output_dir = "scalepool-out";
  c.validate();
  return c;
}

std::string seconds(const std::optional<Duration>& d) {
  return d ? format_seconds(d->count()) + "s" : "n/a";
}

int cmd_run(const RunFlags& f) {
  const ScenarioConfig config = effective_config(f);
  auto plan = harness::load_plan(config);
  harness::Experiment experiment(config, std::move(plan));
  if (config.mode == harness::Mode::kRealTime && config.controller_port != 0) {
    std::cout << "controller at http://" << config.bind_host << ":" << config.controller_port
              << std::endl;
  }
  const harness::ExperimentResult result = experiment.run();
  harness::write_outputs(result, config, config.output_dir);

  std::cout << "seed " << result.seed << ", " << harness::to_string(result.mode) << ", "
            << result.records.size() << " requests (" << result.admitted_total << " admitted, "
            << result.denied_total << " denied)\n"
            << "max replicas " << result.max_replicas_reached << " after "
            << seconds(result.time_to_max) << ", denial-free from " << seconds(result.denial_free_onset)
            << ", settled " << seconds(result.settle_time) << " after load end\n";
  for (const auto& a : result.audits) {
    std::cout << (a.passed ? "audit ok   " : "audit FAIL ") << a.name << ": " << a.detail << "\n";
  }
  std::cout << "outputs in " << config.output_dir.string() << "\n";
  return result.audits_passed() ? kExitOk : kExitAudit;
}

int cmd_validate(const std::vector<std::string>& files) {
  std::vector<descriptors::VnfDescriptor> vnfds;
  std::vector<std::pair<std::string, descriptors::NsDescriptor>> nsds;
  bool ok = true;
  for (const auto& file : files) {
    try {
      const std::string text = harness::read_file(file);
      if (descriptors::detect_kind(file, text) == descriptors::DocumentKind::kNsd) {
        nsds.emplace_back(file, descriptors::parse_nsd(text));
        std::cout << "OK " << file << " (nsd " << nsds.back().second.id << ")\n";
      } else {
        vnfds.push_back(descriptors::parse_vnfd(text));
        std::cout << "OK " << file << " (vnfd " << vnfds.back().id << ")\n";
      }
    } catch (const descriptors::SchemaError& e) {
      std::cout << "FAIL " << file << ": schema error at " << e.what() << "\n";
      ok = false;
    } catch (const descriptors::ValidationError& e) {
      std::cout << "FAIL " << file << ": validation error at " << e.what() << "\n";
      ok = false;
    } catch (const harness::ScenarioError& e) {
      std::cout << "FAIL " << file << ": " << e.what() << "\n";
      ok = false;
    }
  }
  if (ok && !vnfds.empty()) {
    for (const auto& [file, nsd] : nsds) {
      try {
        const auto plan = descriptors::compile_plan(nsd, vnfds);
        std::cout << "OK plan from " << file << ": " << plan.deployments.size()
                  << " deployment(s), " << plan.hpas.size() << " autoscaler(s)\n";
      } catch (const descriptors::DescriptorError& e) {
        std::cout << "FAIL plan from " << file << ": " << e.what() << "\n";
        ok = false;
      }
    }
  }
  return ok ? kExitOk : kExitDescriptor;
}

int fetch_remote(const std::string& url, const std::string& path) {
  httplib::Client client(url);
  client.set_connection_timeout(std::chrono::seconds(5));
  const auto r = client.Get(path);
  if (!r) {
    std::cerr << "GET " << url << path << ": " << httplib::to_string(r.error()) << "\n";
    return kExitUsage;
  }
  if (r->status != 200) {
    std::cerr << "GET " << url << path << ": HTTP " << r->status << "\n";
    return kExitUsage;
  }
  std::cout << r->body;
  return kExitOk;
}

struct InspectFlags {
  RunFlags run;
  int64_t at_ms = 60000;
  std::string url;
};

void add_inspect_flags(CLI::App* cmd, InspectFlags& f) {
  cmd->add_option("scenario", f.run.scenario, "Scenario JSON file (simulated)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--at-ms", f.at_ms, "Simulated time to stop at")->capture_default_str();
  cmd->add_option("--url", f.url, "Controller of a live real-time run, e.g. http://127.0.0.1:9000");
  cmd->add_option("--seed", f.run.seed, "RNG seed");
  cmd->add_option("--scheduler", f.run.scheduler, "rr, wrr or lc")
      ->check(CLI::IsMember({"rr", "wrr", "lc"}));
}

int cmd_inspect(const InspectFlags& f, bool table) {
  if (!f.url.empty()) return fetch_remote(f.url, table ? "/table" : "/hpa-status");
  if (f.run.scenario.empty()) {
    std::cerr << "need a scenario file or --url\n";
    return kExitUsage;
  }
  RunFlags run = f.run;
  run.mode = "simulated";
  const ScenarioConfig config = effective_config(run);
  harness::Experiment experiment(config, harness::load_plan(config));
  experiment.run_until(at_ms(f.at_ms));
  std::cout << (table ? experiment.render_table() : experiment.render_hpa_status());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scalepool: autoscaled video sink pool emulator"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Run an experiment and write its outputs");
  add_run_flags(run, run_flags);

  std::vector<std::string> files;
  auto* validate = app.add_subcommand("validate", "Check VNFD/NSD documents");
  validate->add_option("files", files, "Descriptor files")->required()->check(CLI::ExistingFile);

  InspectFlags table_flags;
  auto* table = app.add_subcommand("table", "ipvsadm-style service table");
  add_inspect_flags(table, table_flags);

  InspectFlags hpa_flags;
  auto* hpa = app.add_subcommand("hpa-status", "kubectl-style autoscaler status");
  add_inspect_flags(hpa, hpa_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_flags);
    if (*validate) return cmd_validate(files);
    if (*table) return cmd_inspect(table_flags, true);
    if (*hpa) return cmd_inspect(hpa_flags, false);
  } catch (const descriptors::DescriptorError& e) {
    std::cerr << "descriptor error: " << e.what() << "\n";
    return kExitDescriptor;
  } catch (const harness::ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return kExitDescriptor;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
