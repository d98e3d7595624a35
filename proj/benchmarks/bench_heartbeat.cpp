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

#include "havld/failover.hpp"
#include "havld/heartbeat.hpp"

namespace {

using namespace havld;

void BM_Encode(benchmark::State& state)
{
    HeartbeatMessage m{NodeState::Active, 200, 1, 0};
    for (auto _ : state) {
        ++m.sequence;
        benchmark::DoNotOptimize(encode(m));
    }
}
BENCHMARK(BM_Encode);

void BM_Decode(benchmark::State& state)
{
    auto bytes = encode(HeartbeatMessage{NodeState::Backup, 100, 2, 99});
    for (auto _ : state)
        benchmark::DoNotOptimize(decode(bytes));
}
BENCHMARK(BM_Decode);

void BM_TickBackup(benchmark::State& state)
{
    FailoverConfig cfg;
    auto role = make_role(100, 2, at_ms(0));
    HeartbeatMessage hb{NodeState::Active, 200, 1, 0};
    std::int64_t t = 0;
    for (auto _ : state) {
        t += 1000;
        role = tick(role, at_ms(t), std::span(&hb, 1), cfg).role;
        benchmark::DoNotOptimize(role);
    }
}
BENCHMARK(BM_TickBackup);

} // namespace

BENCHMARK_MAIN();
