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

#include <chrono>
#include <cstdint>

namespace havld {

using Millis = std::chrono::milliseconds;

// Tag clock for cluster instants. The simulator drives it with virtual time,
// live mode with a monotonic clock; both count milliseconds from an arbitrary
// origin.
struct ClusterClock {
    using duration = Millis;
    using rep = duration::rep;
    using period = duration::period;
    using time_point = std::chrono::time_point<ClusterClock, Millis>;
    static constexpr bool is_steady = true;

    static time_point now() noexcept
    {
        return time_point{std::chrono::duration_cast<Millis>(
            std::chrono::steady_clock::now().time_since_epoch())};
    }
};

using Instant = ClusterClock::time_point;

constexpr Instant at_ms(std::int64_t ms) { return Instant{Millis{ms}}; }
constexpr std::int64_t to_ms(Instant t) { return t.time_since_epoch().count(); }

} // namespace havld
