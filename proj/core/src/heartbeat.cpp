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

#include "havld/heartbeat.hpp"

#include <algorithm>

namespace havld {

std::string_view to_string(NodeState s) noexcept
{
    switch (s) {
    case NodeState::Init:
        return "Init";
    case NodeState::Backup:
        return "Backup";
    case NodeState::Active:
        return "Active";
    case NodeState::Fault:
        return "Fault";
    }
    return "?";
}

std::string_view to_string(Malformed m) noexcept
{
    switch (m) {
    case Malformed::BadLength:
        return "BadLength";
    case Malformed::BadMagic:
        return "BadMagic";
    case Malformed::BadVersion:
        return "BadVersion";
    case Malformed::BadState:
        return "BadState";
    case Malformed::BadReserved:
        return "BadReserved";
    }
    return "?";
}

namespace {

void put_u64(std::byte* out, std::uint64_t v) noexcept
{
    for (int i = 7; i >= 0; --i) {
        out[i] = static_cast<std::byte>(v & 0xff);
        v >>= 8;
    }
}

std::uint64_t get_u64(const std::byte* in) noexcept
{
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v = (v << 8) | std::to_integer<std::uint64_t>(in[i]);
    return v;
}

} // namespace

HeartbeatBytes encode(const HeartbeatMessage& msg) noexcept
{
    HeartbeatBytes out{};
    std::transform(kHeartbeatMagic.begin(), kHeartbeatMagic.end(), out.begin(),
                   [](char c) { return static_cast<std::byte>(c); });
    out[4] = std::byte{kHeartbeatVersion};
    out[5] = static_cast<std::byte>(msg.state);
    out[6] = std::byte{msg.priority};
    out[7] = std::byte{0};
    put_u64(&out[8], msg.node_id);
    put_u64(&out[16], msg.sequence);
    return out;
}

Result<HeartbeatMessage, Malformed> decode(std::span<const std::byte> bytes) noexcept
{
    if (bytes.size() != kHeartbeatSize)
        return unexpected(Malformed::BadLength);
    for (std::size_t i = 0; i < kHeartbeatMagic.size(); ++i) {
        if (bytes[i] != static_cast<std::byte>(kHeartbeatMagic[i]))
            return unexpected(Malformed::BadMagic);
    }
    if (bytes[4] != std::byte{kHeartbeatVersion})
        return unexpected(Malformed::BadVersion);
    auto state = std::to_integer<std::uint8_t>(bytes[5]);
    if (state > static_cast<std::uint8_t>(NodeState::Fault))
        return unexpected(Malformed::BadState);
    if (bytes[7] != std::byte{0})
        return unexpected(Malformed::BadReserved);

    HeartbeatMessage msg;
    msg.state = static_cast<NodeState>(state);
    msg.priority = std::to_integer<std::uint8_t>(bytes[6]);
    msg.node_id = get_u64(&bytes[8]);
    msg.sequence = get_u64(&bytes[16]);
    return msg;
}

} // namespace havld
