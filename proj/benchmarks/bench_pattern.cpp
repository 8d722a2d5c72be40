#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>

#include "napcomm/pattern.hpp"

using namespace napcomm;

namespace {

// A dense many-to-many pattern: `nodes` nodes x 4 procs, every proc sends one
// value-annotated message to every off-node proc.
CommPattern all_to_all(int nodes, int values_per_msg) {
    CommPattern p;
    for (int n = 0; n < nodes; ++n)
        for (int g = 0; g < 4; ++g) p.placement.push_back({n * 4 + g, n * 2 + g / 2, n});
    std::mt19937 rng(5);
    std::uniform_int_distribution<std::int64_t> value(0, 4095);
    for (int src = 0; src < p.num_procs(); ++src)
        for (int dst = 0; dst < p.num_procs(); ++dst) {
            if (p.node_of(src) == p.node_of(dst)) continue;
            Message m;
            m.src = src;
            m.dst = dst;
            for (int k = 0; k < values_per_msg; ++k) m.values.push_back(value(rng));
            std::sort(m.values.begin(), m.values.end());
            m.values.erase(std::unique(m.values.begin(), m.values.end()), m.values.end());
            m.bytes = static_cast<std::int64_t>(m.values.size()) * p.bytes_per_value;
            p.messages.push_back(std::move(m));
        }
    return p;
}

void BM_summarize(benchmark::State& state) {
    const CommPattern p = all_to_all(static_cast<int>(state.range(0)), 8);
    for (auto _ : state) benchmark::DoNotOptimize(summarize(p));
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(p.messages.size()));
}
BENCHMARK(BM_summarize)->Arg(4)->Arg(16)->Arg(64);

void BM_dedup_by_node(benchmark::State& state) {
    const CommPattern p = all_to_all(static_cast<int>(state.range(0)), 32);
    for (auto _ : state) benchmark::DoNotOptimize(dedup_by_node(p));
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(p.messages.size()));
}
BENCHMARK(BM_dedup_by_node)->Arg(4)->Arg(16);

void BM_synthetic_scenario(benchmark::State& state) {
    const Topology topo{2, 20, 2, 40, 1};
    for (auto _ : state)
        benchmark::DoNotOptimize(
            synthetic_scenario(16, state.range(0), 4096, ScenarioMode::Even, topo));
}
BENCHMARK(BM_synthetic_scenario)->Arg(256)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
