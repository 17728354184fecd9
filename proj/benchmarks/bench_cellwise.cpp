#include <benchmark/benchmark.h>

#include "hedgegap/cellwise.hpp"

using namespace hedgegap;

namespace {
const economy::MarketModel& model() {
    static economy::MarketModel m = economy::default_market();
    return m;
}
const economy::Equilibrium& eq() {
    static economy::Equilibrium e = economy::solve_equilibrium(model());
    return e;
}
}  // namespace

static void BM_cell_moments_direct(benchmark::State& state) {
    const auto problem = certification::terminal_problem(model(), eq(), 0.99);
    const certification::TwoTimeEvaluator eval(problem);
    for (auto _ : state) benchmark::DoNotOptimize(eval.cell_moments(-0.5, 0.5).tgt_sq);
}
BENCHMARK(BM_cell_moments_direct);

static void BM_cell_moments_table(benchmark::State& state) {
    const auto problem = certification::terminal_problem(model(), eq(), 0.99);
    const certification::MomentTable table(problem);
    for (auto _ : state) benchmark::DoNotOptimize(table.cell_moments(-0.5, 0.5).tgt_sq);
}
BENCHMARK(BM_cell_moments_table);

static void BM_moment_table_build(benchmark::State& state) {
    const auto problem = certification::terminal_problem(model(), eq(), 0.99);
    for (auto _ : state) {
        certification::MomentTable table(problem, 2049);
        benchmark::DoNotOptimize(table.target_sq_norm());
    }
}
BENCHMARK(BM_moment_table_build);
