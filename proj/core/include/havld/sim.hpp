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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "havld/config.hpp"
#include "havld/failover.hpp"
#include "havld/health.hpp"
#include "havld/result.hpp"
#include "havld/scenario.hpp"

namespace havld::sim {

// Content every simulated web server reads from.
struct SharedStore {
    std::map<std::string, std::string, std::less<>> documents;

    const std::string* get(std::string_view path) const;
    static SharedStore defaults();
};

struct DirectorSpec {
    std::string name;
    std::uint8_t priority = 0;
};

struct Topology {
    // At most two; the first is the configured primary.
    std::vector<DirectorSpec> directors;
    FailoverConfig failover;
    std::vector<ServiceConfig> services;
    SharedStore store;

    static Topology from_config(const ClusterConfig& config);
    // lbnode1 (200), lbnode2 (100), websrv1, websrv2 behind 192.168.1.150:80, rr.
    static Topology orange_cluster();
};

struct Options {
    std::uint64_t seed = 1;
    // One-way delay on director<->director and director<->backend links.
    Millis link_delay{1};
    // A served request holds its connection for duration + U[0, jitter].
    Millis request_duration{20};
    Millis request_jitter{10};
    // Start with the primary Active and holding the VIP instead of both
    // directors cold-starting in Init.
    bool warm_start = true;
    // A failed backend connect counts as a failed probe.
    bool passive_failure_hints = true;
    Millis expire_sweep{1000};
};

struct Metrics {
    std::map<std::string, std::uint64_t> per_server_served;
    std::uint64_t requests = 0;
    std::uint64_t refused = 0;
    // Sum over outages: first refused request to the next served one (or
    // scenario end).
    std::int64_t downtime_ms = 0;
    // Worst crash-to-first-served-request gap over all crash events.
    std::optional<std::int64_t> failover_latency_ms;

    std::uint64_t served() const;
};

// key=value lines.
std::string format_metrics(const Metrics& m);

struct TraceLine {
    std::int64_t at_ms = 0;
    std::string component;
    std::string event;
    std::string detail;
};

struct RequestRecord {
    std::int64_t at_ms = 0;
    std::string path;
    bool served = false;
    std::string director;
    std::string backend;
    std::string body;
    std::string reason;
};

// nullopt state means the node is crashed.
struct StateRecord {
    std::int64_t at_ms = 0;
    std::string node;
    std::optional<NodeState> state;
};

struct HealthRecord {
    std::int64_t at_ms = 0;
    std::string director;
    std::string backend;
    Transition transition = Transition::None;
};

struct VipRecord {
    std::int64_t at_ms = 0;
    std::string node;
    bool acquired = false;
};

struct SimResult {
    Metrics metrics;
    std::vector<TraceLine> trace;
    std::vector<RequestRecord> requests;
    std::vector<StateRecord> states;
    std::vector<HealthRecord> health;
    std::vector<VipRecord> vip;
    std::int64_t end_ms = 0;

    // "<time_ms> <component> <event> <detail>" per line.
    std::string trace_text() const;
    std::optional<NodeState> state_at(std::string_view node, std::int64_t at_ms) const;
    // Directors in Active state at the instant.
    std::vector<std::string> active_at(std::int64_t at_ms) const;
};

enum class SimErrorKind : std::uint8_t { InvalidTopology, UnknownNode };

struct SimError {
    SimErrorKind kind;
    std::string message;
};

std::string to_string(const SimError& e);

// Runs the scenario against the production scheduler, director, health and
// failover code on a virtual clock. Identical inputs give an identical trace.
Result<SimResult, SimError> run(std::span<const ScenarioEvent> scenario, const Topology& topology,
                                const Options& options = {});

} // namespace havld::sim
