/**
 * Copyright 2026 The havld Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "havld/director.hpp"
#include "havld/endpoint.hpp"
#include "havld/failover.hpp"
#include "havld/health.hpp"
#include "havld/result.hpp"
#include "havld/scheduler.hpp"

namespace havld {

struct NodeConfig {
    std::string name;
    // Heartbeat address. Port 0 means "use heartbeat.port".
    Endpoint address;
    std::uint8_t priority = 0;

    bool operator==(const NodeConfig&) const = default;
};

struct HeartbeatConfig {
    Millis interval{1000};
    std::uint32_t dead_factor = 3;
    std::uint16_t port = 539;
    bool preempt = true;

    bool operator==(const HeartbeatConfig&) const = default;
};

struct ServerConfig {
    std::string name;
    Endpoint address;
    std::uint32_t weight = 1;

    bool operator==(const ServerConfig&) const = default;
};

struct ServiceConfig {
    std::string name;
    Endpoint address;
    SchedulerKind scheduler = SchedulerKind::RR;
    ForwardMethod forward = ForwardMethod::Route;
    ProbeSpec probe;
    std::vector<ServerConfig> servers;

    bool operator==(const ServiceConfig&) const = default;
};

struct ClusterConfig {
    NodeConfig primary;
    std::optional<NodeConfig> backup;
    HeartbeatConfig heartbeat;
    std::vector<ServiceConfig> services;

    bool operator==(const ClusterConfig&) const = default;
};

struct ConfigError {
    int line = 0;
    // Field path such as "services[0].servers[1].weight".
    std::string path;
    std::string message;

    bool operator==(const ConfigError&) const = default;
};

std::string to_string(const ConfigError& e);

// Block grammar:
//
//   node primary|backup { name=<id> address=<ip[:port]> priority=<0-255> }
//   heartbeat { interval=<s> dead_factor=<n> port=<n> preempt=<bool> }
//   virtual <name> {
//       address=<ip:port> scheduler=<rr|wrr|lc|wlc> forward=<route|masq>
//       probe { kind=<tcp|http> path=<p> expect=<code> interval=<s>
//               timeout=<s> fall=<n> rise=<n> }
//       server <name> { address=<ip:port> weight=<n> }
//   }
//
// '#' starts a comment. Durations are seconds with up to millisecond
// precision. All errors are collected; a config is returned only when there
// are none.
Result<ClusterConfig, std::vector<ConfigError>> parse_config(std::string_view text);

// Missing file or read failure is reported as a single error with line 0.
Result<ClusterConfig, std::vector<ConfigError>> load_config_file(const std::filesystem::path& path);

// Canonical text: fixed block and key order, defaults omitted.
std::string serialize(const ClusterConfig& config);

ServiceKey service_key(const ServiceConfig& service);
VirtualService make_virtual_service(const ServiceConfig& service);
FailoverConfig failover_config(const ClusterConfig& config);
// Heartbeat endpoint for a node, with the default port filled in.
Endpoint heartbeat_endpoint(const ClusterConfig& config, const NodeConfig& node);

} // namespace havld
