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

#include "havld/scheduler.hpp"

#include <algorithm>
#include <numeric>

namespace havld {

RealServer::RealServer(std::string id, Endpoint address, std::uint32_t weight)
    : id_(std::move(id)), address_(std::move(address)), weight_(weight)
{
}

void RealServer::deactivate_connection()
{
    if (active_ == 0)
        throw CounterUnderflow("active_conns would go negative on " + id_);
    --active_;
    ++inactive_;
}

void RealServer::drop_inactive()
{
    if (inactive_ == 0)
        throw CounterUnderflow("inactive_conns would go negative on " + id_);
    --inactive_;
}

std::optional<SchedulerKind> parse_scheduler_kind(std::string_view name)
{
    if (name == "rr")
        return SchedulerKind::RR;
    if (name == "wrr")
        return SchedulerKind::WRR;
    if (name == "lc")
        return SchedulerKind::LC;
    if (name == "wlc")
        return SchedulerKind::WLC;
    return std::nullopt;
}

std::string_view to_string(SchedulerKind kind) noexcept
{
    switch (kind) {
    case SchedulerKind::RR:
        return "rr";
    case SchedulerKind::WRR:
        return "wrr";
    case SchedulerKind::LC:
        return "lc";
    case SchedulerKind::WLC:
        return "wlc";
    }
    return "?";
}

namespace {

std::optional<std::size_t> select_rr(SchedulerState& st, std::span<const RealServer> pool)
{
    const auto n = static_cast<int>(pool.size());
    for (int step = 1; step <= n; ++step) {
        int i = (st.cursor + step) % n;
        if (pool[i].eligible()) {
            st.cursor = i;
            return static_cast<std::size_t>(i);
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> select_wrr(SchedulerState& st, std::span<const RealServer> pool)
{
    int gcd = 0;
    int max_weight = 0;
    for (const auto& s : pool) {
        if (!s.eligible())
            continue;
        int w = static_cast<int>(s.weight());
        gcd = std::gcd(gcd, w);
        max_weight = std::max(max_weight, w);
    }
    if (max_weight == 0)
        return std::nullopt;

    const auto n = static_cast<int>(pool.size());
    // Terminates: once current_weight is reset to max_weight the heaviest
    // eligible server is reached within n steps.
    for (;;) {
        st.cursor = (st.cursor + 1) % n;
        if (st.cursor == 0) {
            st.current_weight -= gcd;
            if (st.current_weight <= 0)
                st.current_weight = max_weight;
        }
        const auto& s = pool[st.cursor];
        if (s.eligible() && static_cast<int>(s.weight()) >= st.current_weight)
            return static_cast<std::size_t>(st.cursor);
    }
}

std::optional<std::size_t> select_lc(std::span<const RealServer> pool)
{
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (!pool[i].eligible())
            continue;
        if (!best || pool[i].overhead() < pool[*best].overhead())
            best = i;
    }
    return best;
}

std::optional<std::size_t> select_wlc(std::span<const RealServer> pool)
{
    using wide = unsigned __int128;
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const auto& s = pool[i];
        if (!s.eligible())
            continue;
        if (!best) {
            best = i;
            continue;
        }
        const auto& b = pool[*best];
        // overhead(s)/weight(s) < overhead(b)/weight(b)
        if (wide{s.overhead()} * b.weight() < wide{b.overhead()} * s.weight())
            best = i;
    }
    return best;
}

} // namespace

std::optional<std::size_t> select(SchedulerState& state, std::span<const RealServer> pool)
{
    if (pool.empty())
        return std::nullopt;
    if (state.cursor < -1 || state.cursor >= static_cast<int>(pool.size()))
        state.cursor = -1;

    switch (state.kind) {
    case SchedulerKind::RR:
        return select_rr(state, pool);
    case SchedulerKind::WRR:
        return select_wrr(state, pool);
    case SchedulerKind::LC:
        return select_lc(pool);
    case SchedulerKind::WLC:
        return select_wlc(pool);
    }
    return std::nullopt;
}

void note_pool_change(SchedulerState& state) noexcept
{
    state.cursor = -1;
    state.current_weight = 0;
}

} // namespace havld
