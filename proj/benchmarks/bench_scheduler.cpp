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

#include <benchmark/benchmark.h>

#include <random>

#include "havld/director.hpp"
#include "havld/scheduler.hpp"

namespace {

using namespace havld;

std::vector<RealServer> pool_of(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<RealServer> pool;
    for (std::size_t i = 0; i < n; ++i) {
        RealServer s("s" + std::to_string(i), Endpoint{"10.0.0.1", static_cast<std::uint16_t>(i + 1)},
                     static_cast<std::uint32_t>(rng() % 64 + 1));
        s.set_counters(rng() % 1000, rng() % 1000);
        pool.push_back(std::move(s));
    }
    return pool;
}

void BM_Select(benchmark::State& state, SchedulerKind kind)
{
    auto pool = pool_of(static_cast<std::size_t>(state.range(0)), 1);
    SchedulerState st{kind};
    for (auto _ : state)
        benchmark::DoNotOptimize(select(st, pool));
    state.SetItemsProcessed(state.iterations());
}

BENCHMARK_CAPTURE(BM_Select, rr, SchedulerKind::RR)->Arg(2)->Arg(8)->Arg(64);
BENCHMARK_CAPTURE(BM_Select, wrr, SchedulerKind::WRR)->Arg(2)->Arg(8)->Arg(64);
BENCHMARK_CAPTURE(BM_Select, lc, SchedulerKind::LC)->Arg(2)->Arg(8)->Arg(64);
BENCHMARK_CAPTURE(BM_Select, wlc, SchedulerKind::WLC)->Arg(2)->Arg(8)->Arg(64);

void BM_AdmitRelease(benchmark::State& state)
{
    Director d;
    VirtualService vs;
    vs.name = "www.orange.com";
    vs.key = ServiceKey{"192.168.1.150", 80};
    vs.scheduler.kind = SchedulerKind::WLC;
    vs.pool = pool_of(8, 2);
    d.add_service(vs);

    std::uint16_t port = 1024;
    std::int64_t now = 0;
    for (auto _ : state) {
        Endpoint client{"10.1.0.1", port};
        port = port == 65535 ? 1024 : port + 1;
        benchmark::DoNotOptimize(d.admit(vs.key, client, at_ms(now)));
        benchmark::DoNotOptimize(d.release(vs.key, client, at_ms(now)));
        if (++now % 1024 == 0)
            d.expire(at_ms(now + 20'000));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AdmitRelease);

} // namespace

BENCHMARK_MAIN();
