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

#include "scalepool/harness/experiment.h"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "experiment_impl.h"
#include "json.hpp"
#include "scalepool/common/errors.h"
#include "scalepool/metrics/exposition.h"

namespace scalepool::harness {

namespace {

using sinkpool::LifecycleKind;
using sinkpool::PodPhase;

const descriptors::DeploymentTemplate& backend_of(const descriptors::DeploymentPlan& plan) {
  const auto* d = plan.deployment(plan.virtual_service.backend);
  if (d == nullptr) {
    throw ScenarioError("plan has no deployment '" + plan.virtual_service.backend + "'");
  }
  return *d;
}

uint64_t pick_seed(const ScenarioConfig& config) {
  if (config.seed) return *config.seed;
  std::random_device rd;
  return (static_cast<uint64_t>(rd()) << 32) ^ rd();
}

autoscaler::HpaSpec spec_for(const descriptors::DeploymentPlan& plan) {
  const auto& backend = backend_of(plan);
  if (const auto* h = plan.hpa_for(backend.name)) return *h;
  // No scaling policy: a fixed-size pool.
  autoscaler::HpaSpec fixed;
  fixed.name = backend.name;
  fixed.target_deployment = backend.name;
  fixed.min_replicas = fixed.max_replicas = backend.initial_replicas;
  return fixed;
}

class SimGateway final : public loadgen::ServiceGateway {
 public:
  explicit SimGateway(Experiment::Impl& impl) : impl_(impl) {}

  std::optional<std::string> resolve_endpoint() override {
    try {
      return impl_.controller.endpoint();
    } catch (const Unavailable&) {
      return std::nullopt;
    }
  }

  UploadReply upload(const std::string& endpoint, const std::string& stream_id) override {
    UploadReply reply;
    if (endpoint != impl_.vs.listen_addr()) return reply;
    const LatencyModel& lm = impl_.config.latency;
    const auto addr = impl_.balancer_schedule(stream_id);
    if (!addr) {
      reply.latency = lm.base;
    } else {
      const auto admission = impl_.pod_admit(*addr, stream_id);
      if (!sinkpool::admitted(admission)) impl_.balancer_complete(stream_id);
      reply.outcome =
          sinkpool::admitted(admission) ? loadgen::Outcome::kAdmitted : loadgen::Outcome::kDenied;
      reply.latency = lm.base + lm.per_stream * impl_.pod_active_streams(*addr) +
                      loadgen::Latency(impl_.latency_rng.between(0, lm.jitter.count()));
    }
    impl_.audit_conservation();
    return reply;
  }

  void release(const std::string& /*endpoint*/, const std::string& stream_id) override {
    const auto addr = impl_.balancer_route(stream_id);
    if (!addr) return;
    impl_.pod_release(*addr, stream_id);
    impl_.balancer_complete(stream_id);
    impl_.audit_conservation();
  }

 private:
  Experiment::Impl& impl_;
};

std::optional<PodPhase> phase_after(LifecycleKind k) {
  switch (k) {
    case LifecycleKind::kCreated: return std::nullopt;
    case LifecycleKind::kRunning: return PodPhase::kRunning;
    case LifecycleKind::kDraining: return PodPhase::kDraining;
    case LifecycleKind::kTerminated: return PodPhase::kTerminated;
  }
  return std::nullopt;
}

}  // namespace

void Controller::start(std::string endpoint) {
  std::lock_guard lock(mu_);
  endpoint_ = std::move(endpoint);
}

void Controller::stop() {
  std::lock_guard lock(mu_);
  endpoint_.reset();
}

std::string Controller::endpoint() const {
  std::lock_guard lock(mu_);
  if (!endpoint_) throw Unavailable("controller not started");
  return *endpoint_;
}

bool Controller::running() const {
  std::lock_guard lock(mu_);
  return endpoint_.has_value();
}

bool ExperimentResult::audits_passed() const {
  return std::ranges::all_of(audits, [](const AuditResult& a) { return a.passed; });
}

Experiment::Impl::Impl(ScenarioConfig cfg, descriptors::DeploymentPlan p)
    : config(std::move(cfg)),
      plan(std::move(p)),
      spec(spec_for(plan)),
      seed(pick_seed(config)),
      rng(seed),
      latency_rng(rng.fork("latency")),
      pool(backend_of(plan).name, backend_of(plan).pod, rng.fork("pool").next()),
      vs(plan.virtual_service.listen_addr, plan.virtual_service.scheduler) {}

Experiment::Impl::~Impl() = default;

void Experiment::Impl::bootstrap() {
  bootstrapped = true;
  const Timestamp now = exec->now();
  controller.start(vs.listen_addr());
  log_event(now, "", "controller_start", vs.listen_addr());

  handle_lifecycle(pool.scale_to(spec.min_replicas, now));
  status.current_replicas = status.desired_replicas = pool.desired_replicas();

  load_start = now + pool.pod_template().startup_delay;
  load_end = load_start + config.profile.run_duration;
  settle_deadline =
      load_end + config.settle_timeout.value_or(spec.scale_down_stabilization + 4 * spec.sync_period);
  exec->schedule_at(load_start, [this] { begin_load(); });
}

void Experiment::Impl::begin_load() {
  load_begun = true;
  record_row("load_start");
  log_event(load_start, "", "load_start", std::to_string(config.profile.target_users) + " users");
  scrape_loop();
  tick();
  for (int i = 0; i < config.profile.target_users; ++i) {
    const Timestamp at = load_start + loadgen::spawn_offset(config.profile, i);
    if (at >= load_end) break;
    if (stack) {
      stack->start_user(i, at);
    } else {
      exec->schedule_at(at, [this, i] { spawn_user(i); });
    }
  }
  exec->schedule_at(load_end, [this] { end_load(); });
}

void Experiment::Impl::end_load() {
  load_ended = true;
  if (stack) {
    stack->stop_users();
  } else {
    for (auto& s : sessions) s->stop(*sim_gateway);
  }
  record_row("load_end");
  log_event(load_end, "", "load_end", "");
}

void Experiment::Impl::spawn_user(int index) {
  sessions.push_back(std::make_unique<loadgen::UserSession>(
      index, config.profile, rng.fork("user").fork(static_cast<uint64_t>(index)), load_end));
  step_user(sessions.size() - 1);
}

void Experiment::Impl::step_user(size_t slot) {
  const auto next = sessions[slot]->step(exec->now(), *sim_gateway,
                                         [this](const loadgen::RequestRecord& r) { record_request(r); });
  if (next) exec->schedule_at(*next, [this, slot] { step_user(slot); });
}

std::vector<metrics::ScrapeTarget> Experiment::Impl::scrape_targets() const {
  std::vector<metrics::ScrapeTarget> targets;
  for (const auto& pod : pool.pods()) {
    if (pod.phase != PodPhase::kRunning) continue;
    if (stack) {
      targets.push_back({pod.id.value, [s = stack.get(), addr = pod.addr] {
                           return s->fetch_metrics(addr);
                         }});
    } else {
      targets.push_back({pod.id.value, [reg = pod.registry] {
                           return metrics::encode_exposition(*reg);
                         }});
    }
  }
  return targets;
}

void Experiment::Impl::scrape_if_due() {
  const Timestamp now = exec->now();
  if (last_scrape == now) return;
  last_scrape = now;
  const auto targets = scrape_targets();
  const auto result = metrics::scrape(targets, now);
  store.ingest(result.samples);
  for (const auto& f : result.failures) log_event(now, f.pod, "scrape_failed", f.reason);
  store.prune_before(now - config.rate_window - config.scrape_interval);
}

void Experiment::Impl::scrape_loop() {
  if (done) return;
  scrape_if_due();
  exec->schedule_after(config.scrape_interval, [this] { scrape_loop(); });
}

void Experiment::Impl::tick() {
  if (done) return;
  const Timestamp now = exec->now();
  scrape_if_due();

  std::vector<std::string> ready;
  std::set<std::string, std::less<>> ready_set;
  for (const auto& pod : pool.pods()) {
    if (pod.phase != PodPhase::kRunning) continue;
    ready.push_back(pod.id.value);
    ready_set.insert(pod.id.value);
  }
  status.current_replicas = pool.desired_replicas();
  const auto samples =
      autoscaler::derive_pod_metrics(store, spec.metric_name, ready, config.rate_window, now);
  const auto report = autoscaler::reconcile(spec, status, samples, ready_set, now);

  std::string detail = "avg=" + (report.average ? metrics::render_milli(*report.average) : "none") +
                       " current=" + std::to_string(report.current) +
                       " proposed=" + std::to_string(report.proposed) +
                       " desired=" + std::to_string(report.stabilized);
  log_event(now, "", report.skipped ? "tick_skipped" : "tick", detail);
  std::string token = report.skipped ? "tick_skipped" : "tick";
  if (report.command) token += ";scale_to:" + std::to_string(report.command->replicas);
  record_row(token);
  if (report.command) {
    log_event(now, "", "scale", std::to_string(report.current) + "->" +
                                    std::to_string(report.command->replicas));
    handle_lifecycle(pool.scale_to(report.command->replicas, now));
  }

  int active_users = 0;
  if (now >= load_start && now < load_end) {
    active_users = loadgen::spawn_schedule(config.profile, now - load_start);
  }
  ticks.push_back(TickSummary{now, report.skipped, report.average, pool.count(PodPhase::kRunning),
                              pool.desired_replicas(), pool.admitted_total(), pool.denied_total(),
                              active_users});

  if (load_ended) {
    const int min = spec.min_replicas;
    if (pool.count(PodPhase::kRunning) == min && pool.live_count() == min &&
        pool.count(PodPhase::kDraining) == 0 && pool.desired_replicas() == min) {
      settled_at = now;
      finish("settled");
      return;
    }
    if (now >= settle_deadline) {
      finish("settle_timeout");
      return;
    }
  }
  exec->schedule_after(spec.sync_period, [this] { tick(); });
}

void Experiment::Impl::finish(std::string_view why) {
  if (done) return;
  finished_at = exec->now();
  record_row(std::string(why));
  log_event(finished_at, "", why, "");
  {
    std::lock_guard lock(done_mu);
    done = true;
  }
  done_cv.notify_all();
}

std::optional<std::string> Experiment::Impl::balancer_schedule(const std::string& conn_id) {
  try {
    return vs.schedule(conn_id).addr;
  } catch (const NoEndpoint&) {
    return std::nullopt;
  }
}

void Experiment::Impl::balancer_complete(const std::string& conn_id) {
  if (const auto churn = vs.complete(conn_id)) {
    log_event(exec->now(), "", "lb_" + std::string(balancer::to_string(churn->kind)), churn->addr);
  }
}

std::optional<std::string> Experiment::Impl::balancer_route(const std::string& conn_id) const {
  return vs.route_of(conn_id);
}

sinkpool::Admission Experiment::Impl::pod_admit(const std::string& addr,
                                                const std::string& stream_id) {
  const auto* pod = pool.find_by_addr(addr);
  if (pod == nullptr) return sinkpool::Admission::kNotRunning;
  return pool.admit_stream(pod->id, stream_id, exec->now());
}

void Experiment::Impl::pod_release(const std::string& addr, const std::string& stream_id) {
  const auto* pod = pool.find_by_addr(addr);
  if (pod == nullptr || !pod->streams.contains(stream_id)) return;
  handle_lifecycle(pool.release_stream(pod->id, stream_id, exec->now()));
}

int Experiment::Impl::pod_active_streams(const std::string& addr) const {
  const auto* pod = pool.find_by_addr(addr);
  return pod == nullptr ? 0 : pod->active_streams;
}

void Experiment::Impl::handle_lifecycle(const std::vector<sinkpool::LifecycleEvent>& events) {
  std::string tokens;
  for (const auto& ev : events) {
    log_event(ev.t, ev.pod.value, sinkpool::to_string(ev.event), ev.detail);
    if (!tokens.empty()) tokens += ';';
    tokens += std::string(sinkpool::to_string(ev.event)) + ":" + ev.pod.value;
    const auto* pod = pool.find(ev.pod);
    if (ev.event == LifecycleKind::kCreated) {
      if (stack) stack->attach_registry(pod->addr, pod->registry);
      exec->schedule_at(pod->ready_at, [this, id = ev.pod] {
        handle_lifecycle(pool.mark_running(id, exec->now()));
      });
    } else if (ev.event == LifecycleKind::kTerminated && stack) {
      stack->stop_pod(pod->addr);
    }
  }
  sync_balancer();
  if (!tokens.empty()) record_row(tokens);
}

void Experiment::Impl::sync_balancer() {
  std::vector<balancer::Endpoint> endpoints;
  for (const auto& pod : pool.pods()) {
    if (pod.phase == PodPhase::kTerminated) continue;
    endpoints.push_back({pod.addr, pod.phase == PodPhase::kRunning, 1});
  }
  for (const auto& churn : vs.sync_endpoints(endpoints)) {
    log_event(exec->now(), "", "lb_" + std::string(balancer::to_string(churn.kind)), churn.addr);
  }
}

void Experiment::Impl::record_row(std::string event) {
  const Timestamp now = exec->now();
  if (done || !load_begun) return;
  TraceRow row;
  row.t = now;
  row.replicas_running = pool.count(PodPhase::kRunning);
  row.replicas_desired = pool.desired_replicas();
  row.avg_metric = status.current_average;
  row.admitted_total = pool.admitted_total();
  row.denied_total = pool.denied_total();
  row.rps = requests_last_second(now);
  row.event = std::move(event);
  trace.record(std::move(row));
}

void Experiment::Impl::audit_conservation() {
  ++conservation_checks;
  const int lb = vs.total_active();
  const int pods = pool.total_active_streams();
  if (lb != pods) {
    if (conservation_violations++ == 0) {
      first_violation = "t=" + format_seconds(exec->now()) + " balancer=" + std::to_string(lb) +
                        " pods=" + std::to_string(pods);
    }
  }
}

void Experiment::Impl::log_event(Timestamp t, const std::string& pod, std::string_view event,
                                 const std::string& detail) {
  nlohmann::json line = {{"t", static_cast<double>(to_ms(t)) / 1000.0},
                         {"pod", pod},
                         {"event", std::string(event)},
                         {"detail", detail}};
  event_log.push_back(line.dump());
}

void Experiment::Impl::record_request(const loadgen::RequestRecord& rec) {
  std::lock_guard lock(records_mu);
  records.push_back(rec);
  recent_requests.push_back(rec.sent_at);
}

int Experiment::Impl::requests_last_second(Timestamp now) {
  std::lock_guard lock(records_mu);
  const Timestamp horizon = now - std::chrono::seconds(1);
  while (!recent_requests.empty() && recent_requests.front() <= horizon) {
    recent_requests.pop_front();
  }
  return static_cast<int>(std::ranges::count_if(recent_requests,
                                                [&](Timestamp t) { return t <= now; }));
}

std::vector<AuditResult> Experiment::Impl::run_audits() const {
  std::vector<AuditResult> out;

  {
    AuditResult a{"replicas_within_bounds", true,
                  std::to_string(trace.rows().size()) + " rows in [" +
                      std::to_string(spec.min_replicas) + ", " + std::to_string(spec.max_replicas) +
                      "]"};
    for (const auto& r : trace.rows()) {
      if (r.replicas_running < spec.min_replicas || r.replicas_running > spec.max_replicas ||
          r.replicas_desired < spec.min_replicas || r.replicas_desired > spec.max_replicas) {
        a.passed = false;
        a.detail = "t=" + format_seconds(r.t) + " running=" + std::to_string(r.replicas_running) +
                   " desired=" + std::to_string(r.replicas_desired);
        break;
      }
    }
    out.push_back(a);
  }

  out.push_back({"stream_conservation", conservation_violations == 0,
                 conservation_violations == 0
                     ? std::to_string(conservation_checks) + " checks"
                     : std::to_string(conservation_violations) + " violations, first " +
                           first_violation});

  {
    std::lock_guard lock(records_mu);
    const uint64_t issued = records.size();
    const uint64_t served = pool.admitted_total() + pool.denied_total();
    out.push_back({"request_accounting", issued == served,
                   "issued=" + std::to_string(issued) + " admitted+denied=" + std::to_string(served)});
  }

  out.push_back({"no_forced_terminations", pool.forced_terminations() == 0,
                 std::to_string(pool.forced_terminations()) + " streams cut"});

  {
    AuditResult a{"pod_phase_transitions", true,
                  std::to_string(pool.event_log().size()) + " transitions"};
    std::map<std::string, PodPhase> phase;
    for (const auto& ev : pool.event_log()) {
      const auto it = phase.find(ev.pod.value);
      if (ev.event == LifecycleKind::kCreated) {
        if (it != phase.end()) {
          a.passed = false;
          a.detail = ev.pod.value + " created twice";
          break;
        }
        phase[ev.pod.value] = PodPhase::kPending;
        continue;
      }
      const auto to = phase_after(ev.event);
      if (it == phase.end() || !to || !sinkpool::is_legal_transition(it->second, *to)) {
        a.passed = false;
        a.detail = ev.pod.value + " illegal " + std::string(sinkpool::to_string(ev.event));
        break;
      }
      it->second = *to;
    }
    out.push_back(a);
  }

  out.push_back({"no_leaked_streams",
                 pool.total_active_streams() == 0 && vs.open_connections() == 0,
                 "pods=" + std::to_string(pool.total_active_streams()) +
                     " balancer=" + std::to_string(vs.open_connections())});

  {
    AuditResult a{"trace_monotonic", true, std::to_string(trace.rows().size()) + " rows"};
    const auto& rows = trace.rows();
    for (size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].t <= rows[i - 1].t || rows[i].admitted_total < rows[i - 1].admitted_total ||
          rows[i].denied_total < rows[i - 1].denied_total) {
        a.passed = false;
        a.detail = "row " + std::to_string(i) + " at t=" + format_seconds(rows[i].t);
        break;
      }
    }
    out.push_back(a);
  }
  return out;
}

ExperimentResult Experiment::Impl::collect() {
  audit_conservation();
  ExperimentResult r;
  r.mode = config.mode;
  r.seed = seed;
  r.load_start = load_start;
  r.load_end = load_end;
  r.finished_at = finished_at;
  r.settled_at = settled_at;
  r.min_replicas = spec.min_replicas;
  r.max_replicas = spec.max_replicas;
  r.capacity = pool.pod_template().capacity;
  r.scheduler = vs.scheduler();
  r.trace = trace;
  r.ticks = ticks;
  r.event_log = event_log;
  {
    std::lock_guard lock(records_mu);
    r.records = records;
  }
  r.admitted_total = pool.admitted_total();
  r.denied_total = pool.denied_total();
  r.connection_errors = static_cast<uint64_t>(std::ranges::count_if(r.records, [](const auto& rec) {
    return rec.outcome == loadgen::Outcome::kConnectionError;
  }));

  for (const auto& row : trace.rows()) {
    if (row.replicas_running > r.max_replicas_reached) {
      r.max_replicas_reached = row.replicas_running;
      r.time_to_max = row.t - load_start;
    }
  }
  for (const auto& t : ticks) {
    if (t.t > load_end) break;
    if (t.denied_total == r.denied_total) {
      r.denial_free_onset = t.t - load_start;
      break;
    }
  }
  if (settled_at) r.settle_time = *settled_at - load_end;

  r.load_stats = loadgen::aggregate(r.records, load_start);
  loadgen::attach_user_counts(r.load_stats, config.profile);
  r.audits = run_audits();
  return r;
}

Experiment::Experiment(ScenarioConfig config, descriptors::DeploymentPlan plan) {
  config.validate();
  impl_ = std::make_unique<Impl>(std::move(config), std::move(plan));
  impl_->sim_gateway = std::make_unique<SimGateway>(*impl_);
}

Experiment::~Experiment() = default;

ExperimentResult Experiment::run() {
  Impl& m = *impl_;
  if (m.config.mode == Mode::kSimulated) {
    m.exec = &m.sim_clock;
    if (!m.bootstrapped) m.bootstrap();
    m.sim_clock.run_all();
    return m.collect();
  }

  if (m.bootstrapped) throw ContractViolation("experiment already ran");
  m.loop = std::make_unique<RealtimeLoop>();
  m.exec = m.loop.get();
  m.stack = std::make_unique<RealtimeStack>(m);
  m.vs.set_listen_addr(m.stack->start_frontends());
  m.pool.set_address_allocator([&m](const sinkpool::PodId& id) { return m.stack->start_pod(id); });
  m.loop->start();
  m.loop->call([&m] { m.bootstrap(); });
  {
    std::unique_lock lock(m.done_mu);
    m.done_cv.wait(lock, [&m] { return m.done.load(); });
  }
  m.stack->stop_users();
  m.stack->join_users();
  m.loop->stop();
  m.stack->shutdown();
  return m.collect();
}

void Experiment::run_until(Timestamp t) {
  Impl& m = *impl_;
  if (m.config.mode != Mode::kSimulated) {
    throw ContractViolation("run_until needs simulated mode");
  }
  m.exec = &m.sim_clock;
  if (!m.bootstrapped) m.bootstrap();
  m.sim_clock.run_until(t);
}

Timestamp Experiment::now() const { return impl_->exec ? impl_->exec->now() : Timestamp{}; }

std::string Experiment::render_table() const { return impl_->vs.render_table(); }

std::string Experiment::render_hpa_status() const {
  return autoscaler::render_status(impl_->spec, impl_->status);
}

const sinkpool::Deployment& Experiment::pool() const { return impl_->pool; }
const balancer::VirtualService& Experiment::virtual_service() const { return impl_->vs; }
const autoscaler::HpaSpec& Experiment::hpa_spec() const { return impl_->spec; }
const autoscaler::HpaStatus& Experiment::hpa_status() const { return impl_->status; }
const Controller& Experiment::controller() const { return impl_->controller; }

}  // namespace scalepool::harness
