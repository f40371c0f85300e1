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

#include "scalepool/descriptors/descriptors.h"

#include <algorithm>
#include <limits>
#include <set>

#include "json.hpp"

namespace scalepool::descriptors {

namespace {

using nlohmann::json;

std::string at_key(const std::string& path, std::string_view key) {
  return path + "." + std::string(key);
}

std::string at_index(const std::string& path, size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

json parse_document(std::string_view document) {
  json doc = json::parse(document.begin(), document.end(), nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw SchemaError("$", "document is not valid JSON");
  if (!doc.is_object()) throw SchemaError("$", "document must be a JSON object");
  return doc;
}

const json& require(const json& obj, std::string_view key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(at_key(path, key), "missing required field");
  return *it;
}

const json& require_object(const json& obj, std::string_view key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_object()) throw SchemaError(at_key(path, key), "expected an object");
  return v;
}

const json& require_array(const json& obj, std::string_view key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_array()) throw SchemaError(at_key(path, key), "expected an array");
  return v;
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw SchemaError(path, "expected a string");
  return v.get<std::string>();
}

std::string require_string(const json& obj, std::string_view key, const std::string& path) {
  return as_string(require(obj, key, path), at_key(path, key));
}

int64_t require_integer(const json& obj, std::string_view key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number_integer()) throw SchemaError(at_key(path, key), "expected an integer");
  if (v.is_number_unsigned() &&
      v.get<uint64_t>() > static_cast<uint64_t>(std::numeric_limits<int32_t>::max())) {
    throw ValidationError(at_key(path, key), "integer out of range");
  }
  const int64_t n = v.get<int64_t>();
  if (n < std::numeric_limits<int32_t>::min() || n > std::numeric_limits<int32_t>::max()) {
    throw ValidationError(at_key(path, key), "integer out of range");
  }
  return n;
}

std::vector<std::string> string_list(const json& arr, const std::string& path) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (size_t i = 0; i < arr.size(); ++i) {
    std::string s = as_string(arr[i], at_index(path, i));
    if (s.empty()) throw ValidationError(at_index(path, i), "must not be empty");
    if (!seen.insert(s).second) throw ValidationError(at_index(path, i), "duplicate entry '" + s + "'");
    out.push_back(std::move(s));
  }
  return out;
}

// Lowercase alphanumerics and '-', not at the ends: usable in pod names.
bool valid_object_name(std::string_view s) {
  if (s.empty() || s.size() > 40 || s.front() == '-' || s.back() == '-') return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
  });
}

metrics::MilliValue parse_threshold(const json& v, const std::string& path) {
  if (v.is_number_integer()) {
    if (v.is_number_unsigned() && v.get<uint64_t>() > 1'000'000'000'000ULL) {
      throw ValidationError(path, "threshold out of range");
    }
    const int64_t n = v.get<int64_t>();
    if (n > 1'000'000'000'000LL || n < -1'000'000'000'000LL) {
      throw ValidationError(path, "threshold out of range");
    }
    return metrics::MilliValue::from_units(n);
  }
  if (!v.is_string()) throw SchemaError(path, "expected a milli-value string such as \"1\" or \"500m\"");
  try {
    return metrics::parse_milli(v.get<std::string>());
  } catch (const FormatError& e) {
    throw SchemaError(path, e.what());
  }
}

ScalingPolicy parse_scaling(const json& obj, const std::string& path) {
  ScalingPolicy p;
  if (obj.contains("metric")) p.metric_name = as_string(obj["metric"], at_key(path, "metric"));
  if (p.metric_name != autoscaler::kRequestRateMetric &&
      p.metric_name != autoscaler::kActiveStreamsMetric) {
    throw ValidationError(at_key(path, "metric"), "unknown metric '" + p.metric_name + "'");
  }
  p.threshold = parse_threshold(require(obj, "threshold", path), at_key(path, "threshold"));
  p.min_replicas = static_cast<int>(require_integer(obj, "min_replicas", path));
  p.max_replicas = static_cast<int>(require_integer(obj, "max_replicas", path));
  if (p.threshold.millis() <= 0) {
    throw ValidationError(at_key(path, "threshold"), "threshold must be positive");
  }
  if (p.min_replicas < 1) {
    throw ValidationError(at_key(path, "min_replicas"), "min_replicas must be at least 1");
  }
  if (p.max_replicas < p.min_replicas) {
    throw ValidationError(at_key(path, "max_replicas"),
                          "max_replicas (" + std::to_string(p.max_replicas) +
                              ") is below min_replicas (" + std::to_string(p.min_replicas) + ")");
  }
  return p;
}

}  // namespace

VnfDescriptor parse_vnfd(std::string_view document) {
  const json doc = parse_document(document);
  const std::string root = "$";
  VnfDescriptor d;
  d.id = require_string(doc, "id", root);
  if (d.id.empty()) throw ValidationError("$.id", "must not be empty");
  d.name = require_string(doc, "name", root);
  if (!valid_object_name(d.name)) {
    throw ValidationError("$.name", "must be 1-40 lowercase alphanumerics or '-'");
  }

  const json& vdu = require_object(doc, "vdu", root);
  d.vdu.capacity = static_cast<int>(require_integer(vdu, "capacity", "$.vdu"));
  if (d.vdu.capacity < 1) throw ValidationError("$.vdu.capacity", "capacity must be positive");
  if (vdu.contains("startup_delay_ms")) {
    const int64_t ms = require_integer(vdu, "startup_delay_ms", "$.vdu");
    if (ms < 0) throw ValidationError("$.vdu.startup_delay_ms", "must be non-negative");
    d.vdu.startup_delay = Duration(ms);
  }

  if (doc.contains("scaling") && !doc["scaling"].is_null()) {
    const json& scaling = require_object(doc, "scaling", root);
    d.scaling = parse_scaling(scaling, "$.scaling");
  }

  if (doc.contains("connection_points")) {
    d.connection_points =
        string_list(require_array(doc, "connection_points", root), "$.connection_points");
  }
  return d;
}

NsDescriptor parse_nsd(std::string_view document) {
  const json doc = parse_document(document);
  const std::string root = "$";
  NsDescriptor d;
  d.id = require_string(doc, "id", root);
  if (d.id.empty()) throw ValidationError("$.id", "must not be empty");
  d.vnf_refs = string_list(require_array(doc, "vnf_refs", root), "$.vnf_refs");
  if (d.vnf_refs.empty()) throw ValidationError("$.vnf_refs", "must reference at least one VNFD");
  const std::set<std::string> declared(d.vnf_refs.begin(), d.vnf_refs.end());

  if (doc.contains("virtual_links")) {
    const json& links = require_array(doc, "virtual_links", root);
    std::set<std::string> names;
    for (size_t i = 0; i < links.size(); ++i) {
      const std::string path = at_index("$.virtual_links", i);
      if (!links[i].is_object()) throw SchemaError(path, "expected an object");
      VirtualLink link;
      link.name = require_string(links[i], "name", path);
      if (link.name.empty()) throw ValidationError(at_key(path, "name"), "must not be empty");
      if (!names.insert(link.name).second) {
        throw ValidationError(at_key(path, "name"), "duplicate virtual link '" + link.name + "'");
      }
      const json& eps = require_array(links[i], "endpoints", path);
      for (size_t j = 0; j < eps.size(); ++j) {
        const std::string ep_path = at_index(at_key(path, "endpoints"), j);
        if (!eps[j].is_object()) throw SchemaError(ep_path, "expected an object");
        LinkEndpoint ep;
        ep.vnf = require_string(eps[j], "vnf", ep_path);
        ep.connection_point = require_string(eps[j], "cp", ep_path);
        if (!declared.contains(ep.vnf)) {
          throw ValidationError(at_key(ep_path, "vnf"),
                                "endpoint names undeclared VNF '" + ep.vnf + "'");
        }
        link.endpoints.push_back(std::move(ep));
      }
      d.virtual_links.push_back(std::move(link));
    }
  }

  if (doc.contains("frontend") && !doc["frontend"].is_null()) {
    const json& fe = require_object(doc, "frontend", root);
    ServiceFrontend frontend;
    if (fe.contains("listen_addr")) {
      frontend.listen_addr = as_string(fe["listen_addr"], "$.frontend.listen_addr");
      if (frontend.listen_addr.find(':') == std::string::npos) {
        throw ValidationError("$.frontend.listen_addr", "expected host:port");
      }
    }
    if (fe.contains("scheduler")) {
      const std::string name = as_string(fe["scheduler"], "$.frontend.scheduler");
      try {
        frontend.scheduler = balancer::parse_scheduler(name);
      } catch (const ContractViolation& e) {
        throw ValidationError("$.frontend.scheduler", e.what());
      }
    }
    d.frontend = frontend;
  }
  return d;
}

std::string serialize_vnfd(const VnfDescriptor& vnfd) {
  json doc;
  doc["id"] = vnfd.id;
  doc["name"] = vnfd.name;
  doc["vdu"] = {{"capacity", vnfd.vdu.capacity},
                {"startup_delay_ms", to_ms(vnfd.vdu.startup_delay)}};
  if (vnfd.scaling) {
    doc["scaling"] = {{"metric", vnfd.scaling->metric_name},
                      {"threshold", metrics::render_milli(vnfd.scaling->threshold)},
                      {"min_replicas", vnfd.scaling->min_replicas},
                      {"max_replicas", vnfd.scaling->max_replicas}};
  }
  doc["connection_points"] = vnfd.connection_points;
  return doc.dump(2) + "\n";
}

std::string serialize_nsd(const NsDescriptor& nsd) {
  json doc;
  doc["id"] = nsd.id;
  doc["vnf_refs"] = nsd.vnf_refs;
  json links = json::array();
  for (const auto& link : nsd.virtual_links) {
    json eps = json::array();
    for (const auto& ep : link.endpoints) eps.push_back({{"vnf", ep.vnf}, {"cp", ep.connection_point}});
    links.push_back({{"name", link.name}, {"endpoints", eps}});
  }
  doc["virtual_links"] = links;
  if (nsd.frontend) {
    doc["frontend"] = {{"listen_addr", nsd.frontend->listen_addr},
                       {"scheduler", std::string(balancer::to_string(nsd.frontend->scheduler))}};
  }
  return doc.dump(2) + "\n";
}

const DeploymentTemplate* DeploymentPlan::deployment(std::string_view name) const {
  for (const auto& d : deployments) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

const autoscaler::HpaSpec* DeploymentPlan::hpa_for(std::string_view deployment) const {
  for (const auto& h : hpas) {
    if (h.target_deployment == deployment) return &h;
  }
  return nullptr;
}

DeploymentPlan compile_plan(const NsDescriptor& nsd, std::span<const VnfDescriptor> vnfds) {
  std::set<std::string> ids;
  for (size_t i = 0; i < vnfds.size(); ++i) {
    if (!ids.insert(vnfds[i].id).second) {
      throw CompileError("vnfds[" + std::to_string(i) + "].id",
                         "duplicate VNFD id '" + vnfds[i].id + "'");
    }
  }
  auto lookup = [&](std::string_view id) -> const VnfDescriptor* {
    for (const auto& v : vnfds) {
      if (v.id == id) return &v;
    }
    return nullptr;
  };

  std::vector<const VnfDescriptor*> members;
  for (size_t i = 0; i < nsd.vnf_refs.size(); ++i) {
    const VnfDescriptor* v = lookup(nsd.vnf_refs[i]);
    if (v == nullptr) {
      throw ValidationError(at_index("$.vnf_refs", i),
                            "no VNFD with id '" + nsd.vnf_refs[i] + "'");
    }
    members.push_back(v);
  }
  for (size_t i = 0; i < nsd.virtual_links.size(); ++i) {
    const auto& link = nsd.virtual_links[i];
    for (size_t j = 0; j < link.endpoints.size(); ++j) {
      const auto& ep = link.endpoints[j];
      const std::string path = at_index(at_key(at_index("$.virtual_links", i), "endpoints"), j);
      const VnfDescriptor* v = lookup(ep.vnf);
      if (v == nullptr) throw ValidationError(at_key(path, "vnf"), "no VNFD with id '" + ep.vnf + "'");
      if (std::find(v->connection_points.begin(), v->connection_points.end(),
                    ep.connection_point) == v->connection_points.end()) {
        throw ValidationError(at_key(path, "cp"), "VNFD '" + ep.vnf +
                                                      "' has no connection point '" +
                                                      ep.connection_point + "'");
      }
    }
  }

  DeploymentPlan plan;
  std::set<std::string> names;
  for (size_t i = 0; i < members.size(); ++i) {
    const VnfDescriptor& v = *members[i];
    if (!names.insert(v.name).second) {
      throw CompileError(at_index("$.vnf_refs", i), "duplicate deployment name '" + v.name + "'");
    }
    DeploymentTemplate dt;
    dt.name = v.name;
    dt.pod.capacity = v.vdu.capacity;
    dt.pod.startup_delay = v.vdu.startup_delay;
    dt.initial_replicas = v.scaling ? v.scaling->min_replicas : 1;
    plan.deployments.push_back(dt);
    if (v.scaling) {
      autoscaler::HpaSpec hpa;
      hpa.name = v.name;
      hpa.target_deployment = v.name;
      hpa.metric_name = v.scaling->metric_name;
      hpa.target_average = v.scaling->threshold;
      hpa.min_replicas = v.scaling->min_replicas;
      hpa.max_replicas = v.scaling->max_replicas;
      plan.hpas.push_back(hpa);
    }
  }

  if (plan.deployments.empty()) throw CompileError("$.vnf_refs", "the NSD references no VNFD");
  const ServiceFrontend frontend = nsd.frontend.value_or(ServiceFrontend{});
  plan.virtual_service.listen_addr = frontend.listen_addr;
  plan.virtual_service.scheduler = frontend.scheduler;
  plan.virtual_service.backend =
      plan.hpas.empty() ? plan.deployments.front().name : plan.hpas.front().target_deployment;
  return plan;
}

DocumentKind detect_kind(std::string_view filename, std::string_view document) {
  if (filename.ends_with(".vnfd.json")) return DocumentKind::kVnfd;
  if (filename.ends_with(".nsd.json")) return DocumentKind::kNsd;
  const json doc = json::parse(document.begin(), document.end(), nullptr, false);
  if (!doc.is_discarded() && doc.is_object() && doc.contains("vnf_refs")) return DocumentKind::kNsd;
  return DocumentKind::kVnfd;
}

}  // namespace scalepool::descriptors
