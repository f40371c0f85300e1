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

#ifndef SCALEPOOL_DESCRIPTORS_DESCRIPTORS_H_
#define SCALEPOOL_DESCRIPTORS_DESCRIPTORS_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scalepool/autoscaler/hpa.h"
#include "scalepool/balancer/virtual_service.h"
#include "scalepool/common/errors.h"
#include "scalepool/common/time.h"
#include "scalepool/metrics/milli.h"
#include "scalepool/sinkpool/deployment.h"

namespace scalepool::descriptors {

// Every descriptor failure carries the JSON path of the offending node,
// e.g. "$.scaling.min_replicas".
class DescriptorError : public Error {
 public:
  DescriptorError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// Missing field, wrong JSON type, unparsable document.
class SchemaError : public DescriptorError {
 public:
  using DescriptorError::DescriptorError;
};

// Well-formed but breaks an invariant or a reference.
class ValidationError : public DescriptorError {
 public:
  using DescriptorError::DescriptorError;
};

// Descriptors are individually valid but cannot be combined into a plan.
class CompileError : public DescriptorError {
 public:
  using DescriptorError::DescriptorError;
};

struct VduSpec {
  int capacity = 20;
  Duration startup_delay = std::chrono::seconds(2);

  friend bool operator==(const VduSpec&, const VduSpec&) = default;
};

struct ScalingPolicy {
  std::string metric_name = std::string(autoscaler::kRequestRateMetric);
  metrics::MilliValue threshold;
  int min_replicas = 1;
  int max_replicas = 1;

  friend bool operator==(const ScalingPolicy&, const ScalingPolicy&) = default;
};

struct VnfDescriptor {
  std::string id;
  std::string name;
  VduSpec vdu;
  std::optional<ScalingPolicy> scaling;
  std::vector<std::string> connection_points;

  friend bool operator==(const VnfDescriptor&, const VnfDescriptor&) = default;
};

struct LinkEndpoint {
  std::string vnf;
  std::string connection_point;

  friend bool operator==(const LinkEndpoint&, const LinkEndpoint&) = default;
};

struct VirtualLink {
  std::string name;
  std::vector<LinkEndpoint> endpoints;

  friend bool operator==(const VirtualLink&, const VirtualLink&) = default;
};

// Optional front door for the scalable function.
struct ServiceFrontend {
  std::string listen_addr = "192.168.39.55:30000";
  balancer::Scheduler scheduler = balancer::Scheduler::kRoundRobin;

  friend bool operator==(const ServiceFrontend&, const ServiceFrontend&) = default;
};

struct NsDescriptor {
  std::string id;
  std::vector<std::string> vnf_refs;
  std::vector<VirtualLink> virtual_links;
  std::optional<ServiceFrontend> frontend;

  friend bool operator==(const NsDescriptor&, const NsDescriptor&) = default;
};

struct DeploymentTemplate {
  std::string name;
  sinkpool::PodTemplate pod;
  int initial_replicas = 1;

  friend bool operator==(const DeploymentTemplate& a, const DeploymentTemplate& b) {
    return a.name == b.name && a.pod.capacity == b.pod.capacity &&
           a.pod.startup_delay == b.pod.startup_delay && a.initial_replicas == b.initial_replicas;
  }
};

struct VirtualServiceConfig {
  std::string listen_addr;
  balancer::Scheduler scheduler = balancer::Scheduler::kRoundRobin;
  std::string backend;  // deployment name

  friend bool operator==(const VirtualServiceConfig&, const VirtualServiceConfig&) = default;
};

struct DeploymentPlan {
  std::vector<DeploymentTemplate> deployments;
  VirtualServiceConfig virtual_service;
  std::vector<autoscaler::HpaSpec> hpas;

  const DeploymentTemplate* deployment(std::string_view name) const;
  const autoscaler::HpaSpec* hpa_for(std::string_view deployment) const;

  friend bool operator==(const DeploymentPlan&, const DeploymentPlan&) = default;
};

// JSON documents; schemas in docs/descriptors.md. Both throw SchemaError or
// ValidationError and nothing else.
VnfDescriptor parse_vnfd(std::string_view document);
NsDescriptor parse_nsd(std::string_view document);

std::string serialize_vnfd(const VnfDescriptor& vnfd);
std::string serialize_nsd(const NsDescriptor& nsd);

// One deployment per VNFD, a virtual service in front of the first scalable
// VNFD (or the first VNFD), one HpaSpec per scaling block. Pure.
// Throws ValidationError for dangling references, CompileError for clashes.
DeploymentPlan compile_plan(const NsDescriptor& nsd, std::span<const VnfDescriptor> vnfds);

enum class DocumentKind { kVnfd, kNsd };

// By file suffix (.vnfd.json / .nsd.json), falling back to the content.
DocumentKind detect_kind(std::string_view filename, std::string_view document);

}  // namespace scalepool::descriptors

#endif  // SCALEPOOL_DESCRIPTORS_DESCRIPTORS_H_
