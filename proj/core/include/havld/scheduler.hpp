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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "havld/endpoint.hpp"

namespace havld {

class CounterUnderflow : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// One backend in a virtual service pool. The connection counters are the
// Weight / ActiveConn / InActConn columns of the IPVS table.
class RealServer {
public:
    RealServer(std::string id, Endpoint address, std::uint32_t weight = 1);

    const std::string& id() const noexcept { return id_; }
    const Endpoint& address() const noexcept { return address_; }

    std::uint32_t weight() const noexcept { return weight_; }
    void set_weight(std::uint32_t w) noexcept { weight_ = w; }

    bool alive() const noexcept { return alive_; }
    void set_alive(bool alive) noexcept { alive_ = alive; }

    // Weight 0 means quiesced.
    bool eligible() const noexcept { return alive_ && weight_ > 0; }

    std::uint64_t active_conns() const noexcept { return active_; }
    std::uint64_t inactive_conns() const noexcept { return inactive_; }

    // LC/WLC load metric; active connections dominate.
    std::uint64_t overhead() const noexcept { return (active_ << 8) + inactive_; }

    void open_connection() noexcept { ++active_; }
    // Active -> Inactive.
    void deactivate_connection();
    // Removes an expired Inactive connection.
    void drop_inactive();

    // Test and benchmark hook: seed the counters directly.
    void set_counters(std::uint64_t active, std::uint64_t inactive) noexcept
    {
        active_ = active;
        inactive_ = inactive;
    }

private:
    std::string id_;
    Endpoint address_;
    std::uint32_t weight_;
    bool alive_ = true;
    std::uint64_t active_ = 0;
    std::uint64_t inactive_ = 0;
};

enum class SchedulerKind : std::uint8_t { RR, WRR, LC, WLC };

std::optional<SchedulerKind> parse_scheduler_kind(std::string_view name);
// Lowercase ipvsadm token: rr, wrr, lc, wlc.
std::string_view to_string(SchedulerKind kind) noexcept;

struct SchedulerState {
    SchedulerKind kind = SchedulerKind::RR;
    // Rotation position for RR/WRR; -1 means "before the first server".
    int cursor = -1;
    // WRR only.
    int current_weight = 0;

    bool operator==(const SchedulerState&) const = default;
};

// Picks the next backend for a new flow and advances the rotation state.
// Returns the pool index, or nullopt when no server is alive with weight > 0.
//
// RR   next eligible server after the cursor, cyclically.
// WRR  interleaved weighted round robin stepping current_weight down by the
//      gcd of eligible weights once per pass.
// LC   minimum overhead(), lowest index on ties.
// WLC  minimum overhead()/weight() compared by cross-multiplication, lowest
//      index on ties.
std::optional<std::size_t> select(SchedulerState& state, std::span<const RealServer> pool);

// Must be called whenever pool membership, liveness or weights change.
void note_pool_change(SchedulerState& state) noexcept;

} // namespace havld
