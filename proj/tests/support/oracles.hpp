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

// Reference implementations the production code is checked against. They
// work on plain integers and share no code with core/.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "havld/health.hpp"

namespace havld::testing {

struct PoolEntry {
    bool alive = true;
    std::uint32_t weight = 1;
    std::uint64_t active = 0;
    std::uint64_t inactive = 0;
};

// Argmin of 256*active + inactive over eligible entries, lowest index wins.
std::optional<std::size_t> lc_oracle(const std::vector<PoolEntry>& pool);

// Argmin of (256*active + inactive) / weight using floating division.
std::optional<std::size_t> wlc_oracle(const std::vector<PoolEntry>& pool);

// Replays the interleaved weighted round robin loop from a fresh state for
// `calls` selections. Entries with weight 0 or alive=false are skipped.
std::vector<std::size_t> wrr_oracle(const std::vector<PoolEntry>& pool, std::size_t calls);

// Counter-only model of the health hysteresis.
struct HysteresisOracle {
    int fall;
    int rise;
    bool alive = true;
    int fail_streak = 0;
    int ok_streak = 0;

    Transition feed(bool ok);
};

} // namespace havld::testing
