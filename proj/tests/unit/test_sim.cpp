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

#include <random>

#include "havld/sim.hpp"

namespace havld {
namespace {

using sim::Options;
using sim::SimResult;
using sim::Topology;

std::vector<ScenarioEvent> scenario(std::string_view text)
{
    auto r = load_scenario(text);
    EXPECT_TRUE(r) << (r ? "" : to_string(r.error()));
    return r ? *r : std::vector<ScenarioEvent>{};
}

SimResult run_ok(std::string_view text, const Topology& topo = Topology::orange_cluster(), Options opts = {})
{
    auto events = scenario(text);
    auto r = sim::run(events, topo, opts);
    EXPECT_TRUE(r) << (r ? "" : to_string(r.error()));
    return r ? *r : SimResult{};
}

std::vector<std::string> served_backends(const SimResult& r)
{
    std::vector<std::string> out;
    for (const auto& req : r.requests)
        out.push_back(req.served ? req.backend : "-");
    return out;
}

std::optional<std::int64_t> first_health(const SimResult& r, std::string_view backend, Transition t)
{
    for (const auto& h : r.health) {
        if (h.backend == backend && h.transition == t)
            return h.at_ms;
    }
    return std::nullopt;
}

std::optional<std::int64_t> first_active_after(const SimResult& r, std::string_view node, std::int64_t t)
{
    for (const auto& s : r.states) {
        if (s.node == node && s.at_ms >= t && s.state == NodeState::Active)
            return s.at_ms;
    }
    return std::nullopt;
}

TEST(Sim, SixRequestsAlternate)
{
    auto r = run_ok("0 requests 6 100\n");
    EXPECT_EQ(served_backends(r), (std::vector<std::string>{"websrv1", "websrv2", "websrv1", "websrv2", "websrv1",
                                                             "websrv2"}));
    EXPECT_EQ(r.metrics.refused, 0u);
}

TEST(Sim, CrashedBackendIsDetectedByProbesAlone)
{
    Options opts;
    opts.passive_failure_hints = false;
    for (std::int64_t crash_at : {2001, 3500, 4000, 5000, 5999}) {
        auto r = run_ok(std::to_string(crash_at) + " crash websrv2\n30000 end\n", Topology::orange_cluster(), opts);
        auto down = first_health(r, "websrv2", Transition::WentDown);
        ASSERT_TRUE(down) << crash_at;
        // fall * interval + timeout
        EXPECT_LE(*down, crash_at + 7000) << crash_at;
        EXPECT_GT(*down, crash_at);
    }
}

TEST(Sim, TrafficMovesToSurvivorAfterDetection)
{
    Options opts;
    opts.passive_failure_hints = false;
    auto r = run_ok("0 requests 200 100\n5000 crash websrv2\n", Topology::orange_cluster(), opts);
    auto down = first_health(r, "websrv2", Transition::WentDown);
    ASSERT_TRUE(down);
    for (const auto& req : r.requests) {
        if (req.at_ms > *down) {
            EXPECT_TRUE(req.served);
            EXPECT_EQ(req.backend, "websrv1");
        }
    }
}

TEST(Sim, RecoveredBackendRejoins)
{
    auto r = run_ok("0 requests 400 100\n5000 crash websrv2\n15000 recover websrv2\n");
    auto up = first_health(r, "websrv2", Transition::CameUp);
    ASSERT_TRUE(up);
    // rise=2 probe rounds at most.
    EXPECT_LE(*up, 15000 + 2 * 2000 + 2);
    std::vector<std::string> after;
    for (const auto& req : r.requests) {
        if (req.at_ms > *up)
            after.push_back(req.backend);
    }
    ASSERT_GE(after.size(), 4u);
    for (std::size_t i = 1; i < after.size(); ++i)
        EXPECT_NE(after[i], after[i - 1]);
}

TEST(Sim, DirectorFailoverWithinBound)
{
    for (std::int64_t crash_at : {5000, 5250, 5999, 12'345}) {
        auto r = run_ok("0 requests 60 500\n" + std::to_string(crash_at) + " crash lbnode1\n");
        auto active = first_active_after(r, "lbnode2", crash_at);
        ASSERT_TRUE(active) << crash_at;
        EXPECT_LE(*active, crash_at + 4000);
        ASSERT_TRUE(r.metrics.failover_latency_ms);
        EXPECT_LE(*r.metrics.failover_latency_ms, 4500);
    }
}

TEST(Sim, ReturningPrimaryReclaimsCleanly)
{
    auto r = run_ok("0 requests 80 500\n5000 crash lbnode1\n20000 recover lbnode1\n40000 end\n");
    // Backup releases before the primary acquires.
    std::vector<std::pair<std::string, bool>> vip;
    for (const auto& v : r.vip) {
        if (v.at_ms >= 20000)
            vip.emplace_back(v.node, v.acquired);
    }
    ASSERT_EQ(vip.size(), 2u);
    EXPECT_EQ(vip[0], (std::pair<std::string, bool>{"lbnode2", false}));
    EXPECT_EQ(vip[1], (std::pair<std::string, bool>{"lbnode1", true}));

    auto reclaimed = first_active_after(r, "lbnode1", 20000);
    ASSERT_TRUE(reclaimed);
    // The primary's first heartbeat leaves at 20000 and lands one link delay later.
    EXPECT_LE(*reclaimed, 20000 + 1 + 2 * 1000);
    EXPECT_EQ(r.active_at(39000), std::vector<std::string>{"lbnode1"});
}

TEST(Sim, ColdStartSettlesOnPrimary)
{
    Options opts;
    opts.warm_start = false;
    auto r = run_ok("0 requests 30 500\n", Topology::orange_cluster(), opts);
    EXPECT_EQ(r.active_at(6000), std::vector<std::string>{"lbnode1"});
    EXPECT_EQ(r.state_at("lbnode2", 6000), NodeState::Backup);
    for (std::int64_t t = 0; t <= r.end_ms; t += 100)
        EXPECT_LE(r.active_at(t).size(), 1u) << t;
}

TEST(Sim, PartitionHealsToOnePrimary)
{
    auto r = run_ok("0 requests 60 500\n5000 partition lbnode1 lbnode2\n15000 heal lbnode1 lbnode2\n30000 end\n");
    EXPECT_EQ(r.active_at(9000).size(), 2u);
    EXPECT_EQ(r.active_at(15000 + 6000), std::vector<std::string>{"lbnode1"});
    EXPECT_LE(r.metrics.refused, 3u);
}

TEST(Sim, DeterministicPerSeed)
{
    const char* text = "0 requests 300 33\n17 requests 300 33\n2000 crash websrv1\n4000 crash lbnode1\n"
                       "7000 recover websrv1\n9000 recover lbnode1\n";
    auto events = scenario(text);
    for (std::uint64_t seed : {1u, 2u, 99u}) {
        Options opts;
        opts.seed = seed;
        auto a = sim::run(events, Topology::orange_cluster(), opts);
        auto b = sim::run(events, Topology::orange_cluster(), opts);
        ASSERT_TRUE(a && b);
        EXPECT_EQ(a->trace_text(), b->trace_text());
        EXPECT_EQ(sim::format_metrics(a->metrics), sim::format_metrics(b->metrics));
    }
}

TEST(Sim, MetricsConservedOnRandomScenarios)
{
    std::mt19937_64 rng(8);
    const std::vector<std::string> nodes{"lbnode1", "lbnode2", "websrv1", "websrv2"};
    for (int trial = 0; trial < 60; ++trial) {
        std::string text;
        for (int i = 0; i < 40; ++i) {
            auto t = std::to_string(rng() % 30000);
            switch (rng() % 6) {
            case 0:
                text += t + " crash " + nodes[rng() % 4] + "\n";
                break;
            case 1:
                text += t + " recover " + nodes[rng() % 4] + "\n";
                break;
            case 2:
                text += t + (rng() % 2 ? " partition" : " heal") + " lbnode1 lbnode2\n";
                break;
            default:
                text += t + " requests " + std::to_string(rng() % 20 + 1) + " " + std::to_string(rng() % 300 + 1) +
                        (rng() % 3 ? "" : " /about.html") + "\n";
            }
        }
        Options opts;
        opts.seed = rng();
        auto r = run_ok(text, Topology::orange_cluster(), opts);
        std::uint64_t served = 0;
        for (const auto& [name, n] : r.metrics.per_server_served)
            served += n;
        ASSERT_EQ(served + r.metrics.refused, r.metrics.requests);
        std::uint64_t request_events = 0;
        for (const auto& ev : scenario(text))
            request_events += ev.kind == EventKind::ClientRequest;
        ASSERT_EQ(r.metrics.requests, request_events);
    }
}

TEST(Sim, ServedContentComesFromSharedStore)
{
    auto topo = Topology::orange_cluster();
    auto r = run_ok("0 requests 50 10 /index.html\n3 requests 50 10 /about.html\n200 crash websrv1\n");
    for (const auto& req : r.requests) {
        if (!req.served)
            continue;
        const auto* doc = topo.store.get(req.path);
        ASSERT_NE(doc, nullptr);
        EXPECT_EQ(req.body, *doc);
    }
}

TEST(Sim, EqualWeightsSpreadEvenly)
{
    for (auto kind : {SchedulerKind::RR, SchedulerKind::WRR}) {
        auto topo = Topology::orange_cluster();
        topo.services[0].scheduler = kind;
        topo.services[0].servers.push_back(ServerConfig{"websrv3", Endpoint{"192.168.1.102", 80}, 1});
        for (int n : {1, 7, 100, 1001}) {
            auto r = run_ok("0 requests " + std::to_string(n) + " 5\n", topo);
            std::uint64_t lo = UINT64_MAX;
            std::uint64_t hi = 0;
            for (const auto& s : topo.services[0].servers) {
                auto it = r.metrics.per_server_served.find(s.name);
                std::uint64_t c = it == r.metrics.per_server_served.end() ? 0 : it->second;
                lo = std::min(lo, c);
                hi = std::max(hi, c);
            }
            EXPECT_LE(hi - lo, 1u) << n;
        }
    }
}

TEST(Sim, TopologyErrors)
{
    auto events = scenario("0 request\n");
    Topology empty = Topology::orange_cluster();
    empty.directors.clear();
    auto r = sim::run(events, empty);
    ASSERT_FALSE(r);
    EXPECT_EQ(r.error().kind, sim::SimErrorKind::InvalidTopology);

    auto unknown = scenario("0 crash nobody\n");
    auto u = sim::run(unknown, Topology::orange_cluster());
    ASSERT_FALSE(u);
    EXPECT_EQ(u.error().kind, sim::SimErrorKind::UnknownNode);
}

TEST(Sim, SingleDirectorTopology)
{
    auto topo = Topology::orange_cluster();
    topo.directors.pop_back();
    auto r = run_ok("0 requests 10 100\n", topo);
    EXPECT_EQ(r.metrics.refused, 0u);
}

TEST(Sim, TraceFormat)
{
    auto r = run_ok("0 request\n100 crash websrv2\n200 end\n");
    auto text = r.trace_text();
    EXPECT_EQ(text.substr(0, text.find('\n')), "0 lbnode1 state Init->Active");
    EXPECT_NE(text.find("0 lbnode1 served /index.html websrv1\n"), std::string::npos);
    EXPECT_NE(text.find("100 sim crash websrv2\n"), std::string::npos);
    EXPECT_NE(text.find("200 sim end\n"), std::string::npos);
}

TEST(Sim, FromConfigMirrorsConfig)
{
    auto cfg = parse_config(R"(
node primary { name = a address = 10.0.0.1 priority = 9 }
node backup { name = b address = 10.0.0.2 priority = 3 }
heartbeat { interval = 0.5 dead_factor = 4 }
virtual v { address = 10.0.0.9:80 scheduler = wlc server s1 { address = 10.0.0.5:80 weight = 2 } }
)");
    ASSERT_TRUE(cfg);
    auto topo = Topology::from_config(*cfg);
    ASSERT_EQ(topo.directors.size(), 2u);
    EXPECT_EQ(topo.directors[0].name, "a");
    EXPECT_EQ(topo.directors[1].priority, 3);
    EXPECT_EQ(topo.failover.dead_time(), Millis{2000});
    EXPECT_EQ(topo.services, cfg->services);
}

} // namespace
} // namespace havld
