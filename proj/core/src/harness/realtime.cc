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

#include <chrono>
#include <map>
#include <stdexcept>
#include <thread>

#include "experiment_impl.h"
#include "httplib.h"
#include "scalepool/common/errors.h"
#include "scalepool/metrics/exposition.h"

namespace scalepool::harness {

namespace {

constexpr auto kClientTimeout = std::chrono::seconds(5);

void configure(httplib::Client& c) {
  c.set_connection_timeout(kClientTimeout);
  c.set_read_timeout(kClientTimeout);
  c.set_write_timeout(kClientTimeout);
}

std::pair<std::string, int> split_host_port(const std::string& addr) {
  const size_t colon = addr.rfind(':');
  if (colon == std::string::npos) throw ScenarioError("listen address '" + addr + "' has no port");
  return {addr.substr(0, colon), std::stoi(addr.substr(colon + 1))};
}

struct Listener {
  httplib::Server server;
  std::thread thread;
  std::string addr;

  void listen(const std::string& host, int port) {
    if (port == 0) {
      port = server.bind_to_any_port(host);
      if (port < 0) throw Unavailable("cannot bind " + host);
    } else if (!server.bind_to_port(host, port)) {
      throw Unavailable("cannot bind " + host + ":" + std::to_string(port));
    }
    addr = host + ":" + std::to_string(port);
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  void stop() {
    server.stop();
    if (thread.joinable()) thread.join();
  }
};

struct PodListener : Listener {
  std::mutex mu;
  std::shared_ptr<metrics::Registry> registry;
};

class HttpGateway final : public loadgen::ServiceGateway {
 public:
  explicit HttpGateway(std::string controller) : controller_(std::move(controller)) {}

  std::optional<std::string> resolve_endpoint() override {
    httplib::Client c(controller_);
    configure(c);
    const auto r = c.Get("/endpoint");
    if (!r || r->status != 200) return std::nullopt;
    return r->body;
  }

  UploadReply upload(const std::string& endpoint, const std::string& stream_id) override {
    const auto start = std::chrono::steady_clock::now();
    httplib::Client c(endpoint);
    configure(c);
    const auto r = c.Post("/upload?stream=" + stream_id, "", "text/plain");
    UploadReply reply;
    reply.latency = std::chrono::duration_cast<loadgen::Latency>(std::chrono::steady_clock::now() - start);
    if (!r) return reply;
    if (r->status == 200) {
      reply.outcome = loadgen::Outcome::kAdmitted;
    } else if (r->status == 503 && r->body.starts_with("denied")) {
      reply.outcome = loadgen::Outcome::kDenied;
    }
    return reply;
  }

  void release(const std::string& endpoint, const std::string& stream_id) override {
    httplib::Client c(endpoint);
    configure(c);
    c.Post("/release?stream=" + stream_id, "", "text/plain");
  }

 private:
  std::string controller_;
};

}  // namespace

struct RealtimeStack::State {
  explicit State(Experiment::Impl& i) : impl(i) {}

  Experiment::Impl& impl;
  Listener controller;
  Listener balancer;
  std::mutex pods_mu;
  std::map<std::string, std::unique_ptr<PodListener>> pods;

  std::mutex users_mu;
  std::condition_variable users_cv;
  bool users_stop = false;
  std::vector<std::thread> users;

  RealtimeLoop& loop() { return *impl.loop; }

  // false once stop_users() was called.
  bool wait_until(Timestamp t) {
    std::unique_lock lock(users_mu);
    const auto deadline = std::chrono::steady_clock::now() + (t - loop().now());
    users_cv.wait_until(lock, deadline, [this] { return users_stop; });
    return !users_stop;
  }
};

RealtimeStack::RealtimeStack(Experiment::Impl& impl) : state_(std::make_unique<State>(impl)) {}

RealtimeStack::~RealtimeStack() { shutdown(); }

std::string RealtimeStack::start_frontends() {
  State& s = *state_;
  Experiment::Impl& impl = s.impl;

  s.controller.server.Get("/endpoint", [&impl](const httplib::Request&, httplib::Response& res) {
    try {
      res.set_content(impl.controller.endpoint(), "text/plain");
    } catch (const Unavailable& e) {
      res.status = 503;
      res.set_content(e.what(), "text/plain");
    }
  });
  s.controller.server.Get("/table", [&s](const httplib::Request&, httplib::Response& res) {
    res.set_content(s.loop().call([&s] { return s.impl.vs.render_table(); }), "text/plain");
  });
  s.controller.server.Get("/hpa-status", [&s](const httplib::Request&, httplib::Response& res) {
    res.set_content(
        s.loop().call([&s] { return autoscaler::render_status(s.impl.spec, s.impl.status); }),
        "text/plain");
  });
  s.controller.listen(impl.config.bind_host, impl.config.controller_port);

  s.balancer.server.Post("/upload", [&s](const httplib::Request& req, httplib::Response& res) {
    const std::string stream = req.get_param_value("stream");
    if (stream.empty()) {
      res.status = 400;
      return;
    }
    const auto target = s.loop().call([&] { return s.impl.balancer_schedule(stream); });
    if (!target) {
      res.status = 503;
      res.set_content("no endpoint", "text/plain");
      return;
    }
    httplib::Client c(*target);
    configure(c);
    const auto r = c.Post("/upload?stream=" + stream, "", "text/plain");
    if (!r || r->status != 200) {
      s.loop().call([&] { s.impl.balancer_complete(stream); });
    }
    if (!r) {
      res.status = 502;
      res.set_content("upstream error", "text/plain");
      return;
    }
    res.status = r->status;
    res.set_content(r->body, "text/plain");
  });
  s.balancer.server.Post("/release", [&s](const httplib::Request& req, httplib::Response& res) {
    const std::string stream = req.get_param_value("stream");
    const auto target = s.loop().call([&] { return s.impl.balancer_route(stream); });
    if (!target) {
      res.status = 404;
      return;
    }
    httplib::Client c(*target);
    configure(c);
    c.Post("/release?stream=" + stream, "", "text/plain");
    s.loop().call([&] { s.impl.balancer_complete(stream); });
    res.set_content("released", "text/plain");
  });
  if (impl.config.overrides.listen_addr) {
    const auto [host, port] = split_host_port(*impl.config.overrides.listen_addr);
    s.balancer.listen(host, port);
  } else {
    s.balancer.listen(impl.config.bind_host, 0);
  }
  return s.balancer.addr;
}

std::string RealtimeStack::start_pod(const sinkpool::PodId& /*id*/) {
  State& s = *state_;
  auto pod = std::make_unique<PodListener>();
  PodListener* p = pod.get();

  p->server.Post("/upload", [&s, p](const httplib::Request& req, httplib::Response& res) {
    const std::string stream = req.get_param_value("stream");
    const auto admission = s.loop().call([&] { return s.impl.pod_admit(p->addr, stream); });
    if (sinkpool::admitted(admission)) {
      res.set_content("admitted " + stream, "text/plain");
    } else {
      res.status = 503;
      res.set_content("denied " + std::string(sinkpool::to_string(admission)), "text/plain");
    }
  });
  p->server.Post("/release", [&s, p](const httplib::Request& req, httplib::Response& res) {
    const std::string stream = req.get_param_value("stream");
    s.loop().call([&] { s.impl.pod_release(p->addr, stream); });
    res.set_content("released", "text/plain");
  });
  // Read straight from the registry; never waits on the loop.
  p->server.Get("/metrics", [p](const httplib::Request&, httplib::Response& res) {
    std::shared_ptr<metrics::Registry> reg;
    {
      std::lock_guard lock(p->mu);
      reg = p->registry;
    }
    if (!reg) {
      res.status = 503;
      return;
    }
    res.set_content(metrics::encode_exposition(*reg), std::string(metrics::kExpositionContentType));
  });
  p->listen(s.impl.config.bind_host, 0);

  std::lock_guard lock(s.pods_mu);
  const std::string addr = p->addr;
  s.pods.emplace(addr, std::move(pod));
  return addr;
}

void RealtimeStack::attach_registry(const std::string& addr,
                                    std::shared_ptr<metrics::Registry> registry) {
  std::lock_guard lock(state_->pods_mu);
  const auto it = state_->pods.find(addr);
  if (it == state_->pods.end()) return;
  std::lock_guard pod_lock(it->second->mu);
  it->second->registry = std::move(registry);
}

void RealtimeStack::stop_pod(const std::string& addr) {
  std::lock_guard lock(state_->pods_mu);
  const auto it = state_->pods.find(addr);
  // Joined in shutdown(): a handler thread of this pod may be waiting on the
  // loop, which is the caller.
  if (it != state_->pods.end()) it->second->server.stop();
}

std::string RealtimeStack::fetch_metrics(const std::string& addr) const {
  httplib::Client c(addr);
  configure(c);
  const auto r = c.Get("/metrics");
  if (!r) throw std::runtime_error("GET /metrics: " + httplib::to_string(r.error()));
  if (r->status != 200) throw std::runtime_error("GET /metrics: HTTP " + std::to_string(r->status));
  return r->body;
}

const std::string& RealtimeStack::controller_url() const { return state_->controller.addr; }

void RealtimeStack::start_user(int index, Timestamp at) {
  State& s = *state_;
  std::lock_guard lock(s.users_mu);
  s.users.emplace_back([&s, index, at] {
    if (!s.wait_until(at)) return;
    Experiment::Impl& impl = s.impl;
    loadgen::UserSession session(index, impl.config.profile,
                                 impl.rng.fork("user").fork(static_cast<uint64_t>(index)),
                                 impl.load_end);
    HttpGateway gateway(s.controller.addr);
    const loadgen::RecordSink sink = [&impl](const loadgen::RequestRecord& r) {
      impl.record_request(r);
    };
    std::optional<Timestamp> next = s.loop().now();
    while (next) {
      if (!s.wait_until(*next)) {
        session.stop(gateway);
        return;
      }
      next = session.step(s.loop().now(), gateway, sink);
    }
  });
}

void RealtimeStack::stop_users() {
  {
    std::lock_guard lock(state_->users_mu);
    state_->users_stop = true;
  }
  state_->users_cv.notify_all();
}

void RealtimeStack::join_users() {
  std::vector<std::thread> users;
  {
    std::lock_guard lock(state_->users_mu);
    users.swap(state_->users);
  }
  for (auto& t : users) t.join();
}

void RealtimeStack::shutdown() {
  stop_users();
  join_users();
  state_->controller.stop();
  state_->balancer.stop();
  std::map<std::string, std::unique_ptr<PodListener>> pods;
  {
    std::lock_guard lock(state_->pods_mu);
    pods.swap(state_->pods);
  }
  for (auto& [addr, pod] : pods) pod->stop();
}

}  // namespace scalepool::harness
