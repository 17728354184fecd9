#include <benchmark/benchmark.h>

#include <cmath>

#include "hedgegap/quadrature.hpp"

using namespace hedgegap::mathkit;

static void BM_normal_cdf(benchmark::State& state) {
    double x = -6.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(normal_cdf(x));
        x += 1e-4;
        if (x > 6.0) x = -6.0;
    }
}
BENCHMARK(BM_normal_cdf);

static void BM_expect_terminal_bump(benchmark::State& state) {
    QuadratureConfig cfg;
    cfg.node_count = static_cast<int>(state.range(0));
    const NormalLaw law(0.0, 1.0);
    auto f = [](double x) { return 1.0 + 2.5 * std::exp(-x * x / 0.32); };
    for (auto _ : state) benchmark::DoNotOptimize(expect_terminal(f, law, cfg));
}
BENCHMARK(BM_expect_terminal_bump)->Arg(32)->Arg(128);

static void BM_conditional_expectation(benchmark::State& state) {
    QuadratureConfig cfg;
    auto g = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
    double x0 = -2.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(conditional_expectation(g, 0.5, x0, 1.0, cfg));
        x0 += 0.01;
        if (x0 > 2.0) x0 = -2.0;
    }
}
BENCHMARK(BM_conditional_expectation);
