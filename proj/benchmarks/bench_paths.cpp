#include <benchmark/benchmark.h>

#include <vector>

#include "hedgegap/paths.hpp"

static void BM_generate_paths(benchmark::State& state) {
    const int steps = static_cast<int>(state.range(0));
    std::vector<double> grid;
    for (int k = 0; k <= steps; ++k) grid.push_back(static_cast<double>(k) / steps);
    for (auto _ : state) {
        auto ens = hedgegap::mathkit::generate_paths(1.0, grid, 1000, 7);
        benchmark::DoNotOptimize(ens.values.back().back());
    }
    state.SetItemsProcessed(state.iterations() * 1000 * steps);
}
BENCHMARK(BM_generate_paths)->Arg(16)->Arg(256);

BENCHMARK_MAIN();
