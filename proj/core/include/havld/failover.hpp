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
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "havld/heartbeat.hpp"
#include "havld/time.hpp"

namespace havld {

struct FailoverConfig {
    Millis interval{1000};
    std::uint32_t dead_factor = 3;
    // A returning configured primary reclaims the VIP from the backup.
    bool preempt = true;
    // Priority that identifies the configured primary.
    std::uint8_t primary_priority = 200;

    Millis dead_time() const noexcept { return interval * dead_factor; }
};

// Last heartbeat heard from the other director.
struct PeerInfo {
    NodeState state = NodeState::Init;
    std::uint8_t priority = 0;
    std::uint64_t node_id = 0;
    Instant heard_at{};

    bool operator==(const PeerInfo&) const = default;
};

struct NodeRole {
    NodeState state = NodeState::Init;
    std::uint8_t priority = 0;
    std::uint64_t node_id = 0;
    // Last heartbeat from a peer that is Active or about to claim (Init).
    std::optional<Instant> peer_last_seen;
    std::optional<PeerInfo> peer;
    bool vip_held = false;
    Instant state_since{};
    Instant next_heartbeat_at{};

    bool operator==(const NodeRole&) const = default;
};

enum class FailoverAction : std::uint8_t { SendHeartbeat, AcquireVip, ReleaseVip };

std::string_view to_string(FailoverAction a) noexcept;

struct TickResult {
    NodeRole role;
    std::vector<FailoverAction> actions;
};

// Fresh node in Init, listening for one dead time before claiming anything.
NodeRole make_role(std::uint8_t priority, std::uint64_t node_id, Instant now);

// Higher priority wins; equal priorities fall back to the larger node id.
bool outranks(std::uint8_t priority_a, std::uint64_t node_a, std::uint8_t priority_b, std::uint64_t node_b) noexcept;

// Pure transition. Safe to call at any instant: heartbeats are emitted only
// when due, so callers may tick on a fixed interval, on every received
// datagram, and at next_deadline() without changing the outcome.
//
// Init    primary -> Active after one dead time of silence, or as soon as the
//         peer announces Backup; with preemption it waits in Init (announcing
//         itself) while a lower-ranked peer is still Active. Non-primary ->
//         Backup after one dead time, or immediately if an Active peer is heard.
// Backup  -> Active when no Active/Init heartbeat arrived for a dead time.
// Active  -> Backup when an outranking peer is Active, or is in Init while
//         preemption is on. Resignation releases the VIP and announces Backup.
// Fault   retry after one dead time.
TickResult tick(NodeRole role, Instant now, std::span<const HeartbeatMessage> inbox, const FailoverConfig& cfg);

// The caller failed to take over the VIP after an AcquireVip action.
NodeRole vip_acquire_failed(NodeRole role, Instant now);

// Earliest instant at which tick() would act without new input.
Instant next_deadline(const NodeRole& role, const FailoverConfig& cfg);

HeartbeatMessage make_heartbeat(const NodeRole& role, std::uint64_t sequence) noexcept;

} // namespace havld
