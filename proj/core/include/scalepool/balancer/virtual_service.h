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

#ifndef SCALEPOOL_BALANCER_VIRTUAL_SERVICE_H_
#define SCALEPOOL_BALANCER_VIRTUAL_SERVICE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scalepool::balancer {

enum class Scheduler { kRoundRobin, kWeightedRoundRobin, kLeastConnection };

// "rr", "wrr", "lc".
std::string_view to_string(Scheduler s);
// Throws ContractViolation for an unknown name.
Scheduler parse_scheduler(std::string_view name);

struct RealServer {
  std::string addr;
  int weight = 1;
  int active_conns = 0;
  int64_t inactive_conns = 0;
  bool draining = false;

  bool selectable() const { return !draining && weight > 0; }
};

// One pool member as the balancer sees it. `serving` is true for a Running
// pod and false for anything else.
struct Endpoint {
  std::string addr;
  bool serving = false;
  int weight = 1;
};

enum class ChurnKind { kAdded, kDraining, kRemoved, kReactivated };

std::string_view to_string(ChurnKind k);

struct ChurnEvent {
  ChurnKind kind;
  std::string addr;
};

// IPVS-style virtual service: one listen address in front of a changing set
// of real servers. Owned by a single task; calls arrive in total order.
class VirtualService {
 public:
  VirtualService(std::string listen_addr, Scheduler scheduler);

  // Serving endpoints get a server; servers whose endpoint stopped serving
  // (or vanished) drain and are removed once their last connection completes.
  std::vector<ChurnEvent> sync_endpoints(std::span<const Endpoint> pool);

  // Picks a server for conn_id and counts the connection on it.
  // Throws NoEndpoint if nothing is selectable, ContractViolation if conn_id
  // is already open.
  RealServer schedule(std::string_view conn_id);

  // Ends conn_id. Returns the removal event when this drained a server.
  // Throws ContractViolation for an unknown conn_id.
  std::optional<ChurnEvent> complete(std::string_view conn_id);

  // Address of the server currently carrying conn_id, if any.
  std::optional<std::string> route_of(std::string_view conn_id) const;

  // ipvsadm-style dump: `TCP <addr> <sched>` then `  -> <addr> Masq <w> <a> <i>`.
  std::string render_table() const;

  const std::string& listen_addr() const { return listen_addr_; }
  void set_listen_addr(std::string addr) { listen_addr_ = std::move(addr); }
  Scheduler scheduler() const { return scheduler_; }
  std::span<const RealServer> servers() const { return servers_; }
  size_t rr_cursor() const { return rr_cursor_; }
  int total_active() const;
  size_t open_connections() const { return conns_.size(); }

 private:
  std::optional<size_t> index_of(std::string_view addr) const;
  void remove_at(size_t idx);
  std::optional<size_t> pick_round_robin();
  std::optional<size_t> pick_weighted_round_robin();
  std::optional<size_t> pick_least_connection() const;

  std::string listen_addr_;
  Scheduler scheduler_;
  std::vector<RealServer> servers_;
  size_t rr_cursor_ = 0;
  // Interleaved WRR state: last index visited and current weight.
  int64_t wrr_index_ = -1;
  int wrr_current_weight_ = 0;
  std::map<std::string, std::string, std::less<>> conns_;  // conn_id -> server addr
};

}  // namespace scalepool::balancer

#endif  // SCALEPOOL_BALANCER_VIRTUAL_SERVICE_H_
