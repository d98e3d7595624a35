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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "havld/result.hpp"

namespace havld {

enum class NodeState : std::uint8_t { Init = 0, Backup = 1, Active = 2, Fault = 3 };

std::string_view to_string(NodeState s) noexcept;

// Wire layout, 24 bytes, integers big-endian:
//
//   0  magic     "HAHB"
//   4  version   1
//   5  state     NodeState code
//   6  priority  0-255
//   7  reserved  0
//   8  node_id   u64
//  16  sequence  u64
struct HeartbeatMessage {
    NodeState state = NodeState::Init;
    std::uint8_t priority = 0;
    std::uint64_t node_id = 0;
    std::uint64_t sequence = 0;

    bool operator==(const HeartbeatMessage&) const = default;
};

inline constexpr std::size_t kHeartbeatSize = 24;
inline constexpr std::uint8_t kHeartbeatVersion = 1;
inline constexpr std::array<char, 4> kHeartbeatMagic{'H', 'A', 'H', 'B'};

using HeartbeatBytes = std::array<std::byte, kHeartbeatSize>;

enum class Malformed : std::uint8_t { BadLength, BadMagic, BadVersion, BadState, BadReserved };

std::string_view to_string(Malformed m) noexcept;

HeartbeatBytes encode(const HeartbeatMessage& msg) noexcept;

// Checks run in layout order: length, magic, version, state, reserved.
Result<HeartbeatMessage, Malformed> decode(std::span<const std::byte> bytes) noexcept;

} // namespace havld
