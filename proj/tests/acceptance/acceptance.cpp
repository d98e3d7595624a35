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

// Acceptance gate. Each criterion prints one PASS/FAIL line; the exit status
// is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "config_gen.hpp"
#include "havld/backend.hpp"
#include "havld/config.hpp"
#include "havld/director.hpp"
#include "havld/heartbeat.hpp"
#include "havld/log.hpp"
#include "havld/proxy.hpp"
#include "havld/scheduler.hpp"
#include "havld/sim.hpp"
#include "live.hpp"
#include "oracles.hpp"

namespace {

using namespace havld;
using Clock = std::chrono::steady_clock;

struct Verdict {
    bool pass = false;
    std::string detail;
};

Verdict fail(std::string why)
{
    return {false, std::move(why)};
}

double elapsed_ms(Clock::time_point since)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::vector<ScenarioEvent> scenario(const std::string& text)
{
    auto r = load_scenario(text);
    if (!r)
        throw std::runtime_error("scenario: " + to_string(r.error()));
    return *r;
}

sim::SimResult simulate(const std::vector<ScenarioEvent>& events, sim::Options opts = {})
{
    auto r = sim::run(events, sim::Topology::orange_cluster(), opts);
    if (!r)
        throw std::runtime_error(to_string(r.error()));
    return *r;
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// 1
Verdict rr_alternation()
{
    auto events = scenario("0 requests 1000 10\n");
    auto start = Clock::now();
    auto r = simulate(events);
    double ms = elapsed_ms(start);

    for (std::size_t i = 0; i < r.requests.size(); ++i) {
        const auto& req = r.requests[i];
        std::string want = i % 2 == 0 ? "websrv1" : "websrv2";
        if (!req.served || req.backend != want)
            return fail("request " + std::to_string(i) + " went to '" + req.backend + "'");
    }
    auto count = [&](const char* n) { return r.metrics.per_server_served[n]; };
    std::ostringstream d;
    d << count("websrv1") << "/" << count("websrv2") << ", refused=" << r.metrics.refused << ", " << ms << " ms";
    bool ok = r.requests.size() == 1000 && count("websrv1") == 500 && count("websrv2") == 500 &&
              r.metrics.refused == 0 && ms < 1000;
    return {ok, d.str()};
}

// 2
Verdict serve_server_live()
{
    auto start = Clock::now();
    TestBackend web1("webserv1", Endpoint{"127.0.0.1", 0});
    TestBackend web2("webserv2", Endpoint{"127.0.0.1", 0});
    web1.start();
    web2.start();

    const ServiceKey key{"192.168.1.150", 80};
    SynchronizedDirector director;
    director.with([&](Director& d) {
        VirtualService vs;
        vs.name = "www.orange.com";
        vs.key = key;
        vs.pool.emplace_back("webserv1", Endpoint{"127.0.0.1", web1.port()});
        vs.pool.emplace_back("webserv2", Endpoint{"127.0.0.1", web2.port()});
        d.add_service(std::move(vs));
    });
    Proxy proxy(Endpoint{"127.0.0.1", 0}, key, director);
    proxy.start();

    std::string seen;
    for (int i = 0; i < 10; ++i) {
        auto resp = testing::http_head(proxy.port());
        if (!resp)
            return fail("request " + std::to_string(i) + " could not connect");
        auto who = testing::header(*resp, "serve_server");
        if (resp->rfind("HTTP/1.1 200 OK\r\n", 0) != 0 || !who)
            return fail("request " + std::to_string(i) + " got no serve_server header");
        std::string want = i % 2 == 0 ? "webserv1" : "webserv2";
        if (*who != want)
            return fail("request " + std::to_string(i) + " served by " + *who + ", expected " + want);
        seen += (i ? "," : "") + who->substr(7);
    }
    proxy.stop();
    double ms = elapsed_ms(start);
    std::ostringstream d;
    d << "webserv" << seen << " in " << ms << " ms";
    return {ms < 5000, d.str()};
}

// 3
Verdict ipvsadm_table()
{
    auto cfg = load_config_file(HAVLD_SOURCE_DIR "/tests/data/orange.conf");
    if (!cfg)
        return fail("config: " + to_string(cfg.error().front()));
    Director d;
    for (const auto& svc : cfg->services)
        d.add_service(make_virtual_service(svc));
    auto golden = slurp(HAVLD_SOURCE_DIR "/tests/golden/list_primary.txt");
    auto table = d.render_table();
    if (golden.empty())
        return fail("golden file missing");
    if (table != golden)
        return fail("table differs from golden:\n" + table);
    return {table.rfind("IP Virtual Server version 1.2.1 (size=4096)\n", 0) == 0, "byte-identical to golden"};
}

// 4
Verdict backend_failover()
{
    const std::int64_t crash_at = 5000;
    // 60 requests per second as three 20/s streams.
    std::string text = "0 requests 1200 50\n17 requests 1200 50\n33 requests 1200 50\n" + std::to_string(crash_at) +
                       " crash websrv2\n";
    auto events = scenario(text);
    const std::uint64_t refused_cap = static_cast<std::uint64_t>(std::ceil(7.0 * 60.0));

    std::ostringstream d;
    for (bool passive : {true, false}) {
        for (std::uint64_t seed : {1u, 7u}) {
            sim::Options opts;
            opts.seed = seed;
            opts.passive_failure_hints = passive;
            auto a = simulate(events, opts);
            auto b = simulate(events, opts);
            if (a.trace_text() != b.trace_text())
                return fail("trace differs between identical runs (seed " + std::to_string(seed) + ")");

            std::optional<std::int64_t> down;
            for (const auto& h : a.health) {
                if (h.backend == "websrv2" && h.transition == Transition::WentDown) {
                    down = h.at_ms;
                    break;
                }
            }
            if (!down)
                return fail("websrv2 never marked down");
            if (*down > crash_at + 7000)
                return fail("websrv2 marked down at " + std::to_string(*down));
            for (const auto& req : a.requests) {
                if (req.at_ms > *down && req.backend == "websrv2")
                    return fail("request at " + std::to_string(req.at_ms) + " routed to websrv2 after marking");
            }
            if (a.metrics.refused > refused_cap)
                return fail("refused " + std::to_string(a.metrics.refused) + " > " + std::to_string(refused_cap));
            d << (passive ? "hints" : "probes-only") << "/seed" << seed << ": down at t+" << *down - crash_at
              << " ms, refused=" << a.metrics.refused << "; ";
        }
    }
    d << "cap " << refused_cap;
    return {true, d.str()};
}

// 5
Verdict director_failover()
{
    std::ostringstream d;
    for (std::int64_t crash_at : {5000, 5250, 5500, 5999}) {
        auto events = scenario("0 requests 60 500\n" + std::to_string(crash_at) + " crash lbnode1\n");
        auto a = simulate(events);
        auto b = simulate(events);
        if (a.trace_text() != b.trace_text())
            return fail("traces differ between identical runs");
        std::optional<std::int64_t> active;
        for (const auto& s : a.states) {
            if (s.node == "lbnode2" && s.at_ms >= crash_at && s.state == NodeState::Active) {
                active = s.at_ms;
                break;
            }
        }
        if (!active || *active > crash_at + 4000)
            return fail("backup not Active by t+4000 for t=" + std::to_string(crash_at));
        auto latency = a.metrics.failover_latency_ms;
        if (!latency || *latency > 4500)
            return fail("failover latency " + (latency ? std::to_string(*latency) : "none"));
        d << "t=" << crash_at << ": active t+" << *active - crash_at << ", latency " << *latency << " ms; ";
    }
    d << "traces identical";
    return {true, d.str()};
}

// 6
Verdict wrr_proportionality()
{
    std::vector<RealServer> pool{RealServer("A", Endpoint{"10.0.0.1", 80}, 2),
                                 RealServer("B", Endpoint{"10.0.0.2", 80}, 1)};
    auto oracle = testing::wrr_oracle({{true, 2}, {true, 1}}, 6);
    SchedulerState st{SchedulerKind::WRR};
    std::string prefix;
    std::size_t a = 0;
    std::size_t b = 0;
    for (int i = 0; i < 3000; ++i) {
        auto idx = select(st, pool);
        if (!idx)
            return fail("no selection at step " + std::to_string(i));
        if (i < 6) {
            if (*idx != oracle[static_cast<std::size_t>(i)])
                return fail("step " + std::to_string(i) + " disagrees with oracle");
            prefix += pool[*idx].id();
        }
        (*idx == 0 ? a : b)++;
    }
    bool ok = a == 2000 && b == 1000 && prefix == "AABAAB";
    return {ok, std::to_string(a) + "/" + std::to_string(b) + ", prefix " + prefix};
}

// 7
Verdict lc_wlc_oracle()
{
    std::mt19937_64 rng(20240601);
    auto build = [](const std::vector<testing::PoolEntry>& entries) {
        std::vector<RealServer> pool;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            RealServer s("s" + std::to_string(i), Endpoint{"10.0.0.1", static_cast<std::uint16_t>(i + 1)},
                         entries[i].weight);
            s.set_alive(entries[i].alive);
            s.set_counters(entries[i].active, entries[i].inactive);
            pool.push_back(std::move(s));
        }
        return pool;
    };

    int lc_ok = 0;
    int wlc_ok = 0;
    int equal_ok = 0;
    const int trials = 10'000;
    for (int t = 0; t < trials; ++t) {
        std::vector<testing::PoolEntry> entries(rng() % 8 + 1);
        std::uint32_t shared = static_cast<std::uint32_t>(rng() % 64 + 1);
        for (auto& e : entries) {
            e.alive = rng() % 8 != 0;
            e.weight = static_cast<std::uint32_t>(rng() % 65);
            e.active = rng() % 1001;
            e.inactive = rng() % 1001;
        }
        auto pool = build(entries);
        SchedulerState lc{SchedulerKind::LC};
        SchedulerState wlc{SchedulerKind::WLC};
        lc_ok += select(lc, pool) == testing::lc_oracle(entries);
        wlc_ok += select(wlc, pool) == testing::wlc_oracle(entries);

        for (auto& e : entries)
            e.weight = shared;
        auto same = build(entries);
        SchedulerState lc2{SchedulerKind::LC};
        SchedulerState wlc2{SchedulerKind::WLC};
        equal_ok += select(lc2, same) == select(wlc2, same);
    }
    std::ostringstream d;
    d << "LC " << lc_ok << "/" << trials << ", WLC " << wlc_ok << "/" << trials << ", WLC==LC (equal weights) "
      << equal_ok << "/" << trials;
    return {lc_ok == trials && wlc_ok == trials && equal_ok == trials, d.str()};
}

// 8
Verdict split_brain()
{
    const std::int64_t cut = 5000;
    const std::int64_t heal = cut + 10'000;
    auto events = scenario("0 requests 80 500\n" + std::to_string(cut) + " partition lbnode1 lbnode2\n" +
                           std::to_string(heal) + " heal lbnode1 lbnode2\n40000 end\n");
    auto r = simulate(events);
    const std::int64_t dead = sim::Topology::orange_cluster().failover.dead_time().count();

    bool dual = r.active_at(heal - 1).size() == 2;
    std::optional<std::int64_t> settled;
    for (std::int64_t t = heal; t <= r.end_ms; ++t) {
        auto active = r.active_at(t);
        bool single_primary = active == std::vector<std::string>{"lbnode1"};
        if (single_primary && !settled)
            settled = t;
        if (!single_primary)
            settled.reset();
    }
    if (!settled)
        return fail("never settled on lbnode1 alone");
    std::ostringstream d;
    d << "dual-Active during partition: " << (dual ? "yes" : "no") << ", single Active lbnode1 from heal+"
      << *settled - heal << " ms (limit " << 2 * dead << ")";
    return {*settled - heal <= 2 * dead, d.str()};
}

Malformed classify(const std::vector<std::byte>& b)
{
    if (b.size() != kHeartbeatSize)
        return Malformed::BadLength;
    if (b[0] != std::byte{'H'} || b[1] != std::byte{'A'} || b[2] != std::byte{'H'} || b[3] != std::byte{'B'})
        return Malformed::BadMagic;
    if (b[4] != std::byte{1})
        return Malformed::BadVersion;
    if (std::to_integer<int>(b[5]) > 3)
        return Malformed::BadState;
    return Malformed::BadReserved;
}

bool conforming(const std::vector<std::byte>& b)
{
    return b.size() == kHeartbeatSize && classify(b) == Malformed::BadReserved && b[7] == std::byte{0};
}

// 9
Verdict codec_fuzz()
{
    std::mt19937_64 rng(99);
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t targeted = 0;
    for (int i = 0; i < 100'000; ++i) {
        std::vector<std::byte> input;
        if (rng() % 2) {
            input.resize(rng() % 65);
            for (auto& x : input)
                x = static_cast<std::byte>(rng());
        } else {
            // Near-valid: a real frame with a few bytes flipped, maybe resized.
            auto frame = encode(HeartbeatMessage{static_cast<NodeState>(rng() % 4), static_cast<std::uint8_t>(rng()),
                                                 rng(), rng()});
            input.assign(frame.begin(), frame.end());
            int flips = static_cast<int>(rng() % 3);
            for (int f = 0; f < flips; ++f)
                input[rng() % 8] = static_cast<std::byte>(rng());
            if (rng() % 8 == 0)
                input.resize(rng() % 65);
        }

        auto r = decode(input);
        if (conforming(input)) {
            if (!r)
                return fail("valid frame rejected at iteration " + std::to_string(i));
            auto back = encode(*r);
            if (!std::equal(back.begin(), back.end(), input.begin()))
                return fail("re-encoding differs at iteration " + std::to_string(i));
            ++accepted;
            continue;
        }
        if (r)
            return fail("non-conforming input accepted at iteration " + std::to_string(i));
        auto want = classify(input);
        if (r.error() != want)
            return fail("iteration " + std::to_string(i) + ": got " + std::string(to_string(r.error())) +
                        ", expected " + std::string(to_string(want)));
        targeted += want == Malformed::BadLength || want == Malformed::BadMagic || want == Malformed::BadVersion;
        ++rejected;
    }
    std::ostringstream d;
    d << "100000 inputs, " << accepted << " valid accepted, " << rejected << " rejected (" << targeted
      << " length/magic/version) with the expected variant";
    return {true, d.str()};
}

// 10
Verdict config_round_trip()
{
    std::mt19937_64 rng(1000);
    for (int i = 0; i < 1000; ++i) {
        auto c = testing::random_config(rng);
        auto back = parse_config(serialize(c));
        if (!back)
            return fail("config " + std::to_string(i) + " failed to parse: " + to_string(back.error().front()));
        if (!(*back == c))
            return fail("config " + std::to_string(i) + " changed across the round trip");
    }
    return {true, "1000/1000 generated configs equal after parse(serialize(c))"};
}

} // namespace

int main()
{
    havld::log::set_level(spdlog::level::off);

    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"rr-alternation", rr_alternation},
        {"serve-server-live", serve_server_live},
        {"ipvsadm-table", ipvsadm_table},
        {"backend-failover", backend_failover},
        {"director-failover", director_failover},
        {"wrr-proportionality", wrr_proportionality},
        {"lc-wlc-oracle", lc_wlc_oracle},
        {"split-brain", split_brain},
        {"codec-fuzz", codec_fuzz},
        {"config-round-trip", config_round_trip},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = fail(std::string("exception: ") + e.what());
        }
        failed += !v.pass;
        std::cout << (v.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << ": " << v.detail
                  << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
              << " acceptance criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
