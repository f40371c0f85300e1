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

#include "scalepool/metrics/registry.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "scalepool/common/errors.h"

namespace scalepool::metrics {

namespace {

bool name_head(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool name_tail(char c) { return name_head(c) || (c >= '0' && c <= '9'); }

void check_key(std::string_view name, const Labels& labels) {
  if (!valid_metric_name(name)) {
    throw ContractViolation("invalid metric name '" + std::string(name) + "'");
  }
  for (const auto& [label, _] : labels) {
    if (!valid_label_name(label)) {
      throw ContractViolation("invalid label name '" + label + "'");
    }
  }
}

}  // namespace

bool valid_metric_name(std::string_view name) {
  if (name.empty() || !(name_head(name[0]) || name[0] == ':')) return false;
  return std::all_of(name.begin() + 1, name.end(), [](char c) { return name_tail(c) || c == ':'; });
}

bool valid_label_name(std::string_view name) {
  if (name.empty() || !name_head(name[0])) return false;
  return std::all_of(name.begin() + 1, name.end(), name_tail);
}

Registry::Cell& Registry::cell_locked(std::string_view name, const Labels& labels,
                                      MetricKind kind) {
  auto [it, inserted] = series_.try_emplace(SeriesKey{std::string(name), labels},
                                            Cell{kind, 0.0, Timestamp{}});
  if (!inserted && it->second.kind != kind) {
    throw ContractViolation("metric '" + std::string(name) + "' registered with another kind");
  }
  return it->second;
}

void Registry::increment_counter(std::string_view name, const Labels& labels, double amount,
                                 Timestamp now) {
  if (!(amount >= 0.0) || !std::isfinite(amount)) {
    throw ContractViolation("counter increment must be a finite non-negative amount");
  }
  check_key(name, labels);
  std::lock_guard lock(mu_);
  Cell& cell = cell_locked(name, labels, MetricKind::kCounter);
  cell.value += amount;
  cell.updated = std::max(cell.updated, now);
}

void Registry::set_gauge(std::string_view name, const Labels& labels, double value,
                         Timestamp now) {
  if (!std::isfinite(value)) {
    throw ContractViolation("gauge value must be finite");
  }
  check_key(name, labels);
  std::lock_guard lock(mu_);
  Cell& cell = cell_locked(name, labels, MetricKind::kGauge);
  cell.value = value;
  cell.updated = std::max(cell.updated, now);
}

std::optional<double> Registry::value(std::string_view name, const Labels& labels) const {
  std::lock_guard lock(mu_);
  const auto it = series_.find(SeriesKey{std::string(name), labels});
  if (it == series_.end()) return std::nullopt;
  return it->second.value;
}

std::vector<Registry::Entry> Registry::snapshot() const {
  std::lock_guard lock(mu_);
  std::vector<Entry> out;
  out.reserve(series_.size());
  for (const auto& [key, cell] : series_) {
    out.push_back(Entry{key, cell.kind, cell.value, cell.updated});
  }
  return out;
}

size_t Registry::size() const {
  std::lock_guard lock(mu_);
  return series_.size();
}

}  // namespace scalepool::metrics
