#include <benchmark/benchmark.h>

#include "fbmm/analytic_cases.hpp"
#include "fbmm/discrete_model.hpp"
#include "fbmm/kernel.hpp"
#include "fbmm/minimax_solver.hpp"
#include "fbmm/monte_carlo.hpp"

using namespace fbmm;

static void BM_EvalK(benchmark::State& state) {
    const KernelParams p(state.range(0) / 100.0);
    double s = 0.01;
    for (auto _ : state) {
        benchmark::DoNotOptimize(eval_K(p, 1.0, s));
        s = s < 0.98 ? s + 0.01 : 0.01;
    }
}
BENCHMARK(BM_EvalK)->Arg(55)->Arg(75)->Arg(95);

static void BM_BuildModel(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(DiscreteModel::build(0.75, state.range(0)));
    }
}
BENCHMARK(BM_BuildModel)->Arg(200)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_HProfile(benchmark::State& state) {
    const auto m = DiscreteModel::build(0.75, state.range(0));
    const Vector a = Vector::Constant(m.size(), 0.3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(h_profile(m, a));
    }
}
BENCHMARK(BM_HProfile)->Arg(200)->Arg(500)->Arg(1000);

static void BM_Solve(benchmark::State& state) {
    const auto m = DiscreteModel::build(state.range(0) / 100.0, state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve(m));
    }
}
BENCHMARK(BM_Solve)->Args({55, 200})->Args({75, 200})->Args({95, 200})->Args({75, 500})->Unit(benchmark::kMillisecond);

static void BM_SolveProductKernel(benchmark::State& state) {
    const auto k = discretize_kernel(product_kernel_eval, state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve(k));
    }
}
BENCHMARK(BM_SolveProductKernel)->Arg(600)->Unit(benchmark::kMillisecond);

static void BM_MonteCarlo(benchmark::State& state) {
    const auto m = DiscreteModel::build(0.75, 200);
    const Vector a = Vector::Constant(200, 0.3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_mc(m, a, state.range(0), 1, 1));
    }
}
BENCHMARK(BM_MonteCarlo)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
