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

#include <gtest/gtest.h>

#include <map>
#include <random>

#include "havld/scheduler.hpp"
#include "oracles.hpp"

namespace havld {
namespace {

using testing::PoolEntry;

std::vector<RealServer> make_pool(const std::vector<PoolEntry>& entries)
{
    std::vector<RealServer> pool;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        RealServer s("s" + std::to_string(i), Endpoint{"10.0.0." + std::to_string(i + 1), 80}, entries[i].weight);
        s.set_alive(entries[i].alive);
        s.set_counters(entries[i].active, entries[i].inactive);
        pool.push_back(std::move(s));
    }
    return pool;
}

std::vector<RealServer> websrv_pair(std::uint32_t w1 = 1, std::uint32_t w2 = 1)
{
    return {RealServer("websrv1", Endpoint{"192.168.1.100", 80}, w1),
            RealServer("websrv2", Endpoint{"192.168.1.101", 80}, w2)};
}

std::vector<std::string> picks(SchedulerState& st, const std::vector<RealServer>& pool, int n)
{
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) {
        auto idx = select(st, pool);
        out.push_back(idx ? pool[*idx].id() : "none");
    }
    return out;
}

TEST(RoundRobin, AlternatesStartingWithFirstServer)
{
    auto pool = websrv_pair();
    SchedulerState st{SchedulerKind::RR};
    EXPECT_EQ(picks(st, pool, 3), (std::vector<std::string>{"websrv1", "websrv2", "websrv1"}));
    EXPECT_EQ(st.cursor, 0);
}

TEST(RoundRobin, SkipsDeadAndQuiescedServers)
{
    auto pool = make_pool({{true, 1}, {false, 1}, {true, 0}, {true, 1}});
    SchedulerState st{SchedulerKind::RR};
    EXPECT_EQ(picks(st, pool, 4), (std::vector<std::string>{"s0", "s3", "s0", "s3"}));
}

TEST(RoundRobin, FairOverWholeRounds)
{
    for (int n = 1; n <= 7; ++n) {
        std::vector<PoolEntry> entries(static_cast<std::size_t>(n));
        auto pool = make_pool(entries);
        SchedulerState st{SchedulerKind::RR};
        std::map<std::string, int> counts;
        for (const auto& id : picks(st, pool, n * 13))
            ++counts[id];
        ASSERT_EQ(counts.size(), static_cast<std::size_t>(n));
        for (const auto& [id, c] : counts)
            EXPECT_EQ(c, 13) << id;
    }
}

TEST(RoundRobin, TwoServersNeverRepeat)
{
    auto pool = websrv_pair();
    SchedulerState st{SchedulerKind::RR};
    auto seq = picks(st, pool, 101);
    for (std::size_t i = 1; i < seq.size(); ++i)
        EXPECT_NE(seq[i], seq[i - 1]);
}

TEST(RoundRobin, OutOfRangeCursorIsTolerated)
{
    auto pool = websrv_pair();
    SchedulerState st{SchedulerKind::RR, 9, 0};
    auto idx = select(st, pool);
    ASSERT_TRUE(idx);
    EXPECT_LT(*idx, pool.size());
}

TEST(WeightedRoundRobin, EqualWeightsMatchRoundRobin)
{
    auto pool = websrv_pair(4, 4);
    SchedulerState rr{SchedulerKind::RR};
    SchedulerState wrr{SchedulerKind::WRR};
    EXPECT_EQ(picks(rr, pool, 50), picks(wrr, pool, 50));
}

TEST(WeightedRoundRobin, TwoToOneInterleaving)
{
    auto pool = make_pool({{true, 2}, {true, 1}});
    SchedulerState st{SchedulerKind::WRR};
    EXPECT_EQ(picks(st, pool, 6), (std::vector<std::string>{"s0", "s0", "s1", "s0", "s0", "s1"}));
}

TEST(WeightedRoundRobin, MatchesReplayOracleOnRandomPools)
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<PoolEntry> entries(rng() % 6 + 1);
        for (auto& e : entries) {
            e.weight = static_cast<std::uint32_t>(rng() % 8);
            e.alive = rng() % 5 != 0;
        }
        auto pool = make_pool(entries);
        SchedulerState st{SchedulerKind::WRR};
        auto expect = testing::wrr_oracle(entries, 40);
        for (std::size_t i = 0; i < 40; ++i) {
            auto got = select(st, pool);
            if (expect.empty()) {
                ASSERT_FALSE(got);
                break;
            }
            ASSERT_TRUE(got);
            ASSERT_EQ(*got, expect[i]) << "trial " << trial << " step " << i;
        }
    }
}

TEST(WeightedRoundRobin, CountsAreProportionalOverFullCycles)
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<PoolEntry> entries(rng() % 5 + 1);
        std::uint32_t g = 0;
        std::uint32_t sum = 0;
        for (auto& e : entries) {
            e.weight = static_cast<std::uint32_t>(rng() % 6 + 1) * 2;
            g = std::gcd(g, e.weight);
            sum += e.weight;
        }
        auto pool = make_pool(entries);
        SchedulerState st{SchedulerKind::WRR};
        const std::uint32_t cycle = sum / g;
        std::vector<std::uint32_t> counts(entries.size());
        for (std::uint32_t i = 0; i < cycle * 3; ++i)
            ++counts[*select(st, pool)];
        for (std::size_t i = 0; i < entries.size(); ++i)
            EXPECT_EQ(counts[i], 3 * entries[i].weight / g);
    }
}

TEST(WeightedRoundRobin, RestartsCycleAfterPoolChange)
{
    auto pool = make_pool({{true, 1}, {true, 1}});
    SchedulerState st{SchedulerKind::WRR};
    picks(st, pool, 3);
    pool[0].set_weight(2);
    note_pool_change(st);
    EXPECT_EQ(picks(st, pool, 3), (std::vector<std::string>{"s0", "s0", "s1"}));
}

TEST(LeastConnection, PrefersLowerOverhead)
{
    auto pool = make_pool({{true, 1, 2, 0}, {true, 1, 1, 100}});
    EXPECT_EQ(pool[0].overhead(), 512u);
    EXPECT_EQ(pool[1].overhead(), 356u);
    SchedulerState st{SchedulerKind::LC};
    EXPECT_EQ(select(st, pool), 1u);
}

TEST(LeastConnection, TiesGoToLowestIndex)
{
    auto pool = make_pool({{false, 1, 0, 0}, {true, 1, 1, 0}, {true, 1, 1, 0}});
    SchedulerState st{SchedulerKind::LC};
    EXPECT_EQ(select(st, pool), 1u);
}

TEST(WeightedLeastConnection, WeightScalesLoad)
{
    // 512/4 = 128 beats 256/1.
    auto pool = make_pool({{true, 1, 1, 0}, {true, 4, 2, 0}});
    SchedulerState st{SchedulerKind::WLC};
    EXPECT_EQ(select(st, pool), 1u);
}

TEST(WeightedLeastConnection, HugeCountersDoNotOverflow)
{
    auto pool = make_pool({{true, 1'000'000, 1ull << 40, 0}, {true, 999'999, 1ull << 40, 0}});
    SchedulerState st{SchedulerKind::WLC};
    EXPECT_EQ(select(st, pool), 0u);
}

TEST(LeastConnection, RandomPoolsAgreeWithOracle)
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10'000; ++trial) {
        std::vector<PoolEntry> entries(rng() % 8 + 1);
        for (auto& e : entries) {
            e.alive = rng() % 6 != 0;
            e.weight = static_cast<std::uint32_t>(rng() % 65);
            e.active = rng() % 1001;
            e.inactive = rng() % 1001;
        }
        auto pool = make_pool(entries);
        SchedulerState lc{SchedulerKind::LC};
        SchedulerState wlc{SchedulerKind::WLC};
        ASSERT_EQ(select(lc, pool), testing::lc_oracle(entries)) << trial;
        ASSERT_EQ(select(wlc, pool), testing::wlc_oracle(entries)) << trial;
    }
}

TEST(Scheduler, NothingEligibleReturnsNone)
{
    for (auto kind : {SchedulerKind::RR, SchedulerKind::WRR, SchedulerKind::LC, SchedulerKind::WLC}) {
        SchedulerState st{kind};
        EXPECT_FALSE(select(st, std::span<const RealServer>{}));
        auto pool = make_pool({{false, 1}, {true, 0}});
        EXPECT_FALSE(select(st, pool));
    }
}

TEST(Scheduler, NeverPicksIneligibleServer)
{
    std::mt19937_64 rng(5);
    for (auto kind : {SchedulerKind::RR, SchedulerKind::WRR, SchedulerKind::LC, SchedulerKind::WLC}) {
        std::vector<PoolEntry> entries(6);
        auto pool = make_pool(entries);
        SchedulerState st{kind};
        for (int step = 0; step < 3000; ++step) {
            if (step % 7 == 0) {
                auto& s = pool[rng() % pool.size()];
                if (rng() % 2)
                    s.set_alive(!s.alive());
                else
                    s.set_weight(static_cast<std::uint32_t>(rng() % 4));
                if (rng() % 2)
                    note_pool_change(st);
            }
            if (auto idx = select(st, pool)) {
                ASSERT_TRUE(pool[*idx].eligible());
                pool[*idx].open_connection();
            }
        }
    }
}

TEST(Scheduler, NotePoolChangeResets)
{
    SchedulerState st{SchedulerKind::WRR, 5, 3};
    note_pool_change(st);
    EXPECT_EQ(st, (SchedulerState{SchedulerKind::WRR, -1, 0}));
    note_pool_change(st);
    EXPECT_EQ(st, (SchedulerState{SchedulerKind::WRR, -1, 0}));
}

TEST(Scheduler, KindNamesRoundTrip)
{
    for (auto kind : {SchedulerKind::RR, SchedulerKind::WRR, SchedulerKind::LC, SchedulerKind::WLC})
        EXPECT_EQ(parse_scheduler_kind(to_string(kind)), kind);
    EXPECT_FALSE(parse_scheduler_kind("sh"));
    EXPECT_FALSE(parse_scheduler_kind("RR"));
}

TEST(RealServerCounters, UnderflowThrows)
{
    RealServer s("a", Endpoint{"10.0.0.1", 80});
    EXPECT_THROW(s.deactivate_connection(), CounterUnderflow);
    EXPECT_THROW(s.drop_inactive(), CounterUnderflow);
    s.open_connection();
    s.deactivate_connection();
    EXPECT_EQ(s.active_conns(), 0u);
    EXPECT_EQ(s.inactive_conns(), 1u);
    s.drop_inactive();
    EXPECT_EQ(s.inactive_conns(), 0u);
}

} // namespace
} // namespace havld
