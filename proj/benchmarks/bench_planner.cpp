#include <benchmark/benchmark.h>

#include "napcomm/machine.hpp"
#include "napcomm/pattern.hpp"
#include "napcomm/split_planner.hpp"

using namespace napcomm;

namespace {

const Topology& topo() {
    static const Topology t{2, 20, 2, 40, 1};
    return t;
}

void BM_plan_split_scenario(benchmark::State& state) {
    const CommPattern p = synthetic_scenario(16, state.range(0), 4096,
                                             ScenarioMode::Even, topo());
    for (auto _ : state) benchmark::DoNotOptimize(plan_split(p, topo(), {8192}));
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(p.messages.size()));
}
BENCHMARK(BM_plan_split_scenario)->Arg(256)->Arg(1024)->Arg(4096);

void BM_plan_split_oversubscribed(benchmark::State& state) {
    // single fat stream per origin: exercises the chunk cutter and the
    // cap-boost path
    CommPattern p;
    const int senders = static_cast<int>(state.range(0));
    for (int n = 0; n <= senders; ++n) p.placement.push_back({n * 4, n * 2, n});
    for (int s = 1; s <= senders; ++s) p.messages.push_back({s, 0, 2'000'000, {}});
    for (auto _ : state) benchmark::DoNotOptimize(plan_split(p, topo(), {8192}));
}
BENCHMARK(BM_plan_split_oversubscribed)->Arg(1)->Arg(4)->Arg(16);

void BM_cost_plan(benchmark::State& state) {
    const MachineModel mm = lassen_preset();
    const CommPattern p =
        synthetic_scenario(16, 1024, 4096, ScenarioMode::Even, topo());
    const SplitPlan plan = plan_split(p, topo(), {8192});
    for (auto _ : state) {
        benchmark::DoNotOptimize(cost_plan(plan, mm, SplitMode::MD));
        benchmark::DoNotOptimize(cost_plan(plan, mm, SplitMode::DD));
    }
}
BENCHMARK(BM_cost_plan);

void BM_plan_to_text(benchmark::State& state) {
    const CommPattern p =
        synthetic_scenario(16, 1024, 4096, ScenarioMode::Even, topo());
    const SplitPlan plan = plan_split(p, topo(), {8192});
    for (auto _ : state) benchmark::DoNotOptimize(plan_to_text(plan));
}
BENCHMARK(BM_plan_to_text);

}  // namespace

BENCHMARK_MAIN();
