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

#include "havld/failover.hpp"

#include <algorithm>

namespace havld {

std::string_view to_string(FailoverAction a) noexcept
{
    switch (a) {
    case FailoverAction::SendHeartbeat:
        return "SendHeartbeat";
    case FailoverAction::AcquireVip:
        return "AcquireVip";
    case FailoverAction::ReleaseVip:
        return "ReleaseVip";
    }
    return "?";
}

NodeRole make_role(std::uint8_t priority, std::uint64_t node_id, Instant now)
{
    NodeRole role;
    role.priority = priority;
    role.node_id = node_id;
    role.state_since = now;
    role.next_heartbeat_at = now;
    return role;
}

bool outranks(std::uint8_t priority_a, std::uint64_t node_a, std::uint8_t priority_b, std::uint64_t node_b) noexcept
{
    if (priority_a != priority_b)
        return priority_a > priority_b;
    return node_a > node_b;
}

namespace {

void enter(NodeRole& role, NodeState next, Instant now, std::vector<FailoverAction>& actions)
{
    const NodeState prev = role.state;
    role.state = next;
    role.state_since = now;
    switch (next) {
    case NodeState::Active:
        role.vip_held = true;
        actions.push_back(FailoverAction::AcquireVip);
        role.next_heartbeat_at = now;
        break;
    case NodeState::Backup:
        if (prev == NodeState::Active) {
            role.vip_held = false;
            actions.push_back(FailoverAction::ReleaseVip);
        }
        // One-shot announcement; Backup is otherwise silent.
        actions.push_back(FailoverAction::SendHeartbeat);
        break;
    case NodeState::Init:
        role.vip_held = false;
        role.next_heartbeat_at = now;
        break;
    case NodeState::Fault:
        role.vip_held = false;
        break;
    }
}

void heartbeat_if_due(NodeRole& role, Instant now, const FailoverConfig& cfg, std::vector<FailoverAction>& actions)
{
    if (role.state != NodeState::Active && role.state != NodeState::Init)
        return;
    if (now < role.next_heartbeat_at)
        return;
    actions.push_back(FailoverAction::SendHeartbeat);
    role.next_heartbeat_at = now + cfg.interval;
}

} // namespace

TickResult tick(NodeRole role, Instant now, std::span<const HeartbeatMessage> inbox, const FailoverConfig& cfg)
{
    const Millis dead = cfg.dead_time();
    bool must_resign = false;

    for (const auto& msg : inbox) {
        if (msg.node_id == role.node_id)
            continue;
        role.peer = PeerInfo{msg.state, msg.priority, msg.node_id, now};
        if (msg.state == NodeState::Active || msg.state == NodeState::Init)
            role.peer_last_seen = now;
        if (outranks(msg.priority, msg.node_id, role.priority, role.node_id)) {
            if (msg.state == NodeState::Active || (msg.state == NodeState::Init && cfg.preempt))
                must_resign = true;
        }
    }

    const bool is_primary = role.priority == cfg.primary_priority;
    const bool peer_active =
        role.peer && role.peer->state == NodeState::Active && now - role.peer->heard_at < dead;
    const bool peer_outranks =
        role.peer && outranks(role.peer->priority, role.peer->node_id, role.priority, role.node_id);

    std::vector<FailoverAction> actions;
    switch (role.state) {
    case NodeState::Init:
        if (peer_active) {
            const bool reclaim = is_primary && cfg.preempt && !peer_outranks;
            if (!reclaim)
                enter(role, NodeState::Backup, now, actions);
        } else if (is_primary) {
            const bool peer_stood_down = role.peer && role.peer->state == NodeState::Backup &&
                                         role.peer->heard_at >= role.state_since;
            if (now - role.state_since >= dead || peer_stood_down)
                enter(role, NodeState::Active, now, actions);
        } else if (now - role.state_since >= dead) {
            enter(role, NodeState::Backup, now, actions);
        }
        break;

    case NodeState::Backup: {
        if (peer_active && is_primary && cfg.preempt && !peer_outranks) {
            enter(role, NodeState::Init, now, actions);
            break;
        }
        Instant quiet_since = std::max(role.peer_last_seen.value_or(role.state_since), role.state_since);
        if (now - quiet_since >= dead)
            enter(role, NodeState::Active, now, actions);
        break;
    }

    case NodeState::Active:
        if (must_resign)
            enter(role, NodeState::Backup, now, actions);
        break;

    case NodeState::Fault:
        if (now - role.state_since >= dead)
            enter(role, peer_active ? NodeState::Backup : NodeState::Active, now, actions);
        break;
    }

    heartbeat_if_due(role, now, cfg, actions);
    return {std::move(role), std::move(actions)};
}

NodeRole vip_acquire_failed(NodeRole role, Instant now)
{
    std::vector<FailoverAction> ignored;
    enter(role, NodeState::Fault, now, ignored);
    return role;
}

Instant next_deadline(const NodeRole& role, const FailoverConfig& cfg)
{
    const Millis dead = cfg.dead_time();
    switch (role.state) {
    case NodeState::Init:
        return std::min(role.next_heartbeat_at, role.state_since + dead);
    case NodeState::Backup:
        return std::max(role.peer_last_seen.value_or(role.state_since), role.state_since) + dead;
    case NodeState::Active:
        return role.next_heartbeat_at;
    case NodeState::Fault:
        return role.state_since + dead;
    }
    return role.state_since + dead;
}

HeartbeatMessage make_heartbeat(const NodeRole& role, std::uint64_t sequence) noexcept
{
    return HeartbeatMessage{role.state, role.priority, role.node_id, sequence};
}

} // namespace havld
