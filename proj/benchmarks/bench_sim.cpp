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

#include "havld/sim.hpp"

namespace {

using namespace havld;

void BM_SimRequests(benchmark::State& state)
{
    auto events = load_scenario("0 requests " + std::to_string(state.range(0)) + " 1\n");
    auto topo = sim::Topology::orange_cluster();
    for (auto _ : state) {
        auto r = sim::run(*events, topo);
        benchmark::DoNotOptimize(r);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimRequests)->Arg(1000)->Arg(10'000)->Unit(benchmark::kMillisecond);

void BM_SimFailover(benchmark::State& state)
{
    auto events = load_scenario("0 requests 120 500\n5000 crash lbnode1\n30000 recover lbnode1\n"
                                "40000 partition lbnode1 lbnode2\n50000 heal lbnode1 lbnode2\n60000 end\n");
    auto topo = sim::Topology::orange_cluster();
    for (auto _ : state) {
        auto r = sim::run(*events, topo);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_SimFailover)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
