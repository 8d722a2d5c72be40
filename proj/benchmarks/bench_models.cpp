#include <benchmark/benchmark.h>

#include "napcomm/machine.hpp"
#include "napcomm/pattern.hpp"
#include "napcomm/strategy.hpp"

using namespace napcomm;

namespace {

const MachineModel& machine() {
    static const MachineModel mm = lassen_preset();
    return mm;
}

void BM_postal(benchmark::State& state) {
    const PostalParams& p =
        machine().table.p2p(Flavor::InterCpu, Protocol::Eager, Locality::OffNode);
    double s = 17.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(postal_time(p, s));
        s += 1.0;
    }
}
BENCHMARK(BM_postal);

void BM_maxrate(benchmark::State& state) {
    const ParameterTable& t = machine().table;
    double s = 1024.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(maxrate_time(t, 64, s, 40.0 * s, Protocol::Rendezvous));
        s += 8.0;
    }
}
BENCHMARK(BM_maxrate);

void BM_t_copy(benchmark::State& state) {
    const ParameterTable& t = machine().table;
    for (auto _ : state)
        benchmark::DoNotOptimize(t_copy(t, 65536.0, 16384.0, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_t_copy)->Arg(1)->Arg(4);

void BM_evaluate_one(benchmark::State& state) {
    const auto kind = static_cast<StrategyKind>(state.range(0));
    const PatternSummary sm = summarize(
        synthetic_scenario(16, 256, 4096, ScenarioMode::Even, machine().topology));
    for (auto _ : state) benchmark::DoNotOptimize(evaluate(kind, sm, machine()));
}
BENCHMARK(BM_evaluate_one)->DenseRange(0, 7);

void BM_compare_all(benchmark::State& state) {
    const PatternSummary sm = summarize(
        synthetic_scenario(16, 256, 4096, ScenarioMode::Even, machine().topology));
    for (auto _ : state) benchmark::DoNotOptimize(compare(sm, machine()));
}
BENCHMARK(BM_compare_all);

void BM_sweep_default_grid(benchmark::State& state) {
    const auto grid = default_size_grid();
    for (auto _ : state)
        benchmark::DoNotOptimize(sweep(machine(), {16, 256}, grid));
}
BENCHMARK(BM_sweep_default_grid);

}  // namespace

BENCHMARK_MAIN();
