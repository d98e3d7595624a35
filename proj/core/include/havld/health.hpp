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
#include <string>
#include <string_view>
#include <utility>

#include "havld/director.hpp"
#include "havld/endpoint.hpp"
#include "havld/result.hpp"
#include "havld/time.hpp"

namespace havld {

enum class ProbeKind : std::uint8_t { TcpConnect, HttpGet };

struct ProbeSpec {
    ProbeKind kind = ProbeKind::TcpConnect;
    // HttpGet only.
    std::string path = "/";
    int expect_status = 200;
    Millis interval{2000};
    Millis timeout{1000};
    // Consecutive results needed to flip liveness.
    int fall = 3;
    int rise = 2;

    bool operator==(const ProbeSpec&) const = default;
};

// Empty string when the spec is usable, otherwise a description of the first
// violated constraint.
std::string validate(const ProbeSpec& spec);

enum class ProbeOutcome : std::uint8_t { Success, Timeout, Refused, BadStatus };

std::string_view to_string(ProbeOutcome o) noexcept;

struct ProbeResult {
    ProbeOutcome outcome = ProbeOutcome::Success;
    std::string detail;

    bool ok() const noexcept { return outcome == ProbeOutcome::Success; }
};

// Live probe against a real TCP endpoint. Never throws on network failure;
// every failure mode is reported in the result.
ProbeResult probe(const Endpoint& backend, const ProbeSpec& spec);
ProbeResult probe(const RealServer& backend, const ProbeSpec& spec);

struct HealthState {
    int consecutive_failures = 0;
    int consecutive_successes = 0;
    bool alive = true;

    bool operator==(const HealthState&) const = default;
};

enum class Transition : std::uint8_t { None, WentDown, CameUp };

std::string_view to_string(Transition t) noexcept;

// Hysteresis: liveness flips only after `fall` consecutive failures or `rise`
// consecutive successes, and the transition is reported on the flip only.
std::pair<HealthState, Transition> record(HealthState state, const ProbeResult& result, const ProbeSpec& spec);

enum class ReconcileError : std::uint8_t { UnknownBackend };

// Applies a liveness flip to the director. WentDown also moves every Active
// flow on the backend to Inactive. Throws std::invalid_argument for
// Transition::None.
Result<void, ReconcileError> reconcile(Director& director, std::string_view backend_id, Transition transition,
                                       Instant now);

// Per-service bookkeeping of HealthState for each tracked backend.
class HealthMonitor {
public:
    explicit HealthMonitor(ProbeSpec spec) : spec_(std::move(spec)) {}

    const ProbeSpec& spec() const noexcept { return spec_; }

    void track(const std::string& backend_id, bool alive = true);
    // Feeds one probe (or passive failure hint) into the backend's state.
    // Untracked backends are ignored and report None.
    Transition observe(std::string_view backend_id, const ProbeResult& result);

    const HealthState* state(std::string_view backend_id) const;
    const std::map<std::string, HealthState, std::less<>>& states() const noexcept { return states_; }

private:
    ProbeSpec spec_;
    std::map<std::string, HealthState, std::less<>> states_;
};

} // namespace havld
