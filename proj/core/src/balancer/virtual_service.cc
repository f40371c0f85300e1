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

#include "scalepool/balancer/virtual_service.h"

#include <algorithm>
#include <numeric>
#include <set>

#include "scalepool/common/errors.h"

namespace scalepool::balancer {

std::string_view to_string(Scheduler s) {
  switch (s) {
    case Scheduler::kRoundRobin: return "rr";
    case Scheduler::kWeightedRoundRobin: return "wrr";
    case Scheduler::kLeastConnection: return "lc";
  }
  return "rr";
}

Scheduler parse_scheduler(std::string_view name) {
  if (name == "rr") return Scheduler::kRoundRobin;
  if (name == "wrr") return Scheduler::kWeightedRoundRobin;
  if (name == "lc") return Scheduler::kLeastConnection;
  throw ContractViolation("unknown scheduler '" + std::string(name) + "' (expected rr, wrr or lc)");
}

std::string_view to_string(ChurnKind k) {
  switch (k) {
    case ChurnKind::kAdded: return "added";
    case ChurnKind::kDraining: return "draining";
    case ChurnKind::kRemoved: return "removed";
    case ChurnKind::kReactivated: return "reactivated";
  }
  return "unknown";
}

VirtualService::VirtualService(std::string listen_addr, Scheduler scheduler)
    : listen_addr_(std::move(listen_addr)), scheduler_(scheduler) {}

std::optional<size_t> VirtualService::index_of(std::string_view addr) const {
  for (size_t i = 0; i < servers_.size(); ++i) {
    if (servers_[i].addr == addr) return i;
  }
  return std::nullopt;
}

void VirtualService::remove_at(size_t idx) {
  servers_.erase(servers_.begin() + static_cast<std::ptrdiff_t>(idx));
  // Keep the cursor on the same successor instead of snapping back to 0.
  if (idx < rr_cursor_) --rr_cursor_;
  if (wrr_index_ >= static_cast<int64_t>(idx)) --wrr_index_;
  if (servers_.empty()) {
    rr_cursor_ = 0;
    wrr_index_ = -1;
    wrr_current_weight_ = 0;
  } else {
    rr_cursor_ %= servers_.size();
  }
}

int VirtualService::total_active() const {
  int total = 0;
  for (const auto& s : servers_) total += s.active_conns;
  return total;
}

std::vector<ChurnEvent> VirtualService::sync_endpoints(std::span<const Endpoint> pool) {
  std::vector<ChurnEvent> events;
  std::set<std::string, std::less<>> serving;
  for (const Endpoint& ep : pool) {
    if (!ep.serving) continue;
    serving.insert(ep.addr);
    if (const auto idx = index_of(ep.addr)) {
      RealServer& s = servers_[*idx];
      s.weight = ep.weight;
      if (s.draining) {
        s.draining = false;
        events.push_back({ChurnKind::kReactivated, s.addr});
      }
      continue;
    }
    servers_.push_back(RealServer{ep.addr, ep.weight, 0, 0, false});
    events.push_back({ChurnKind::kAdded, ep.addr});
  }
  for (size_t i = 0; i < servers_.size();) {
    RealServer& s = servers_[i];
    if (serving.contains(s.addr)) {
      ++i;
      continue;
    }
    if (!s.draining) {
      s.draining = true;
      events.push_back({ChurnKind::kDraining, s.addr});
    }
    if (s.active_conns == 0) {
      events.push_back({ChurnKind::kRemoved, s.addr});
      remove_at(i);
      continue;
    }
    ++i;
  }
  return events;
}

std::optional<size_t> VirtualService::pick_round_robin() {
  const size_t n = servers_.size();
  for (size_t k = 0; k < n; ++k) {
    const size_t idx = (rr_cursor_ + k) % n;
    if (servers_[idx].selectable()) {
      rr_cursor_ = (idx + 1) % n;
      return idx;
    }
  }
  return std::nullopt;
}

// Classic interleaved weighted round-robin: walk the list, lowering the
// current weight by gcd(weights) at each wrap, and pick the first server
// whose weight reaches it.
std::optional<size_t> VirtualService::pick_weighted_round_robin() {
  int max_weight = 0;
  int gcd = 0;
  for (const auto& s : servers_) {
    if (!s.selectable()) continue;
    max_weight = std::max(max_weight, s.weight);
    gcd = std::gcd(gcd, s.weight);
  }
  if (max_weight == 0) return std::nullopt;
  wrr_current_weight_ = std::min(wrr_current_weight_, max_weight);
  const auto n = static_cast<int64_t>(servers_.size());
  while (true) {
    wrr_index_ = (wrr_index_ + 1) % n;
    if (wrr_index_ == 0) {
      wrr_current_weight_ -= gcd;
      if (wrr_current_weight_ <= 0) wrr_current_weight_ = max_weight;
    }
    const RealServer& s = servers_[static_cast<size_t>(wrr_index_)];
    if (s.selectable() && s.weight >= wrr_current_weight_) {
      return static_cast<size_t>(wrr_index_);
    }
  }
}

std::optional<size_t> VirtualService::pick_least_connection() const {
  std::optional<size_t> best;
  for (size_t i = 0; i < servers_.size(); ++i) {
    if (!servers_[i].selectable()) continue;
    if (!best || servers_[i].active_conns < servers_[*best].active_conns) best = i;
  }
  return best;
}

RealServer VirtualService::schedule(std::string_view conn_id) {
  if (conns_.contains(conn_id)) {
    throw ContractViolation("connection " + std::string(conn_id) + " already scheduled");
  }
  std::optional<size_t> idx;
  switch (scheduler_) {
    case Scheduler::kRoundRobin: idx = pick_round_robin(); break;
    case Scheduler::kWeightedRoundRobin: idx = pick_weighted_round_robin(); break;
    case Scheduler::kLeastConnection: idx = pick_least_connection(); break;
  }
  if (!idx) {
    throw NoEndpoint("no selectable real server behind " + listen_addr_);
  }
  RealServer& s = servers_[*idx];
  ++s.active_conns;
  conns_.emplace(std::string(conn_id), s.addr);
  return s;
}

std::optional<ChurnEvent> VirtualService::complete(std::string_view conn_id) {
  const auto it = conns_.find(conn_id);
  if (it == conns_.end()) {
    throw ContractViolation("unknown connection " + std::string(conn_id));
  }
  const std::string addr = it->second;
  conns_.erase(it);
  const auto idx = index_of(addr);
  if (!idx) {
    throw ContractViolation("connection " + std::string(conn_id) + " routed to a removed server");
  }
  RealServer& s = servers_[*idx];
  --s.active_conns;
  ++s.inactive_conns;
  if (s.draining && s.active_conns == 0) {
    remove_at(*idx);
    return ChurnEvent{ChurnKind::kRemoved, addr};
  }
  return std::nullopt;
}

std::optional<std::string> VirtualService::route_of(std::string_view conn_id) const {
  const auto it = conns_.find(conn_id);
  if (it == conns_.end()) return std::nullopt;
  return it->second;
}

std::string VirtualService::render_table() const {
  std::string out = "TCP " + listen_addr_ + " " + std::string(to_string(scheduler_)) + "\n";
  for (const auto& s : servers_) {
    out += "  -> " + s.addr + " Masq " + std::to_string(s.weight) + " " +
           std::to_string(s.active_conns) + " " + std::to_string(s.inactive_conns) + "\n";
  }
  return out;
}

}  // namespace scalepool::balancer
