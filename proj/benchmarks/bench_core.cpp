#include <benchmark/benchmark.h>

#include <vector>

#include "matmart/bounds.hpp"
#include "matmart/martingale.hpp"
#include "matmart/rng.hpp"
#include "matmart/symmat.hpp"
#include "matmart/verify.hpp"

namespace {

using namespace matmart;

SymMatrix random_sym(uint64_t seed, int dim) {
    Rng rng(seed);
    std::vector<double> entries(static_cast<size_t>(dim) * dim);
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
            const double v = rng.next_range(-1.0, 1.0);
            entries[static_cast<size_t>(i) * dim + j] = v;
            entries[static_cast<size_t>(j) * dim + i] = v;
        }
    return SymMatrix(dim, entries);
}

void BM_Eigh(benchmark::State& state) {
    const SymMatrix a = random_sym(1, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(eigh(a));
    }
}
BENCHMARK(BM_Eigh)->Arg(4)->Arg(16)->Arg(64)->Arg(128);

void BM_MatrixExp(benchmark::State& state) {
    const SymMatrix a = random_sym(2, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(matrix_exp(a));
    }
}
BENCHMARK(BM_MatrixExp)->Arg(4)->Arg(16);

void BM_TraceExp(benchmark::State& state) {
    const SymMatrix a = random_sym(3, 8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(trace_exp(a));
    }
}
BENCHMARK(BM_TraceExp);

void BM_FreedmanBound(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(freedman_tail_bound(TailQuery{2.0, 4.0, 1.0, 8}));
    }
}
BENCHMARK(BM_FreedmanBound);

void BM_OptimizeThetaClosedForm(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(optimize_theta(1.0, 1.0, CgfBoundFn::freedman(), 1));
    }
}
BENCHMARK(BM_OptimizeThetaClosedForm);

void BM_OptimizeThetaNumeric(benchmark::State& state) {
    const CgfBoundFn quad([](double theta) { return theta * theta / 2.0; }, "theta^2/2");
    for (auto _ : state) {
        benchmark::DoNotOptimize(optimize_theta(2.0, 1.0, quad, 1));
    }
}
BENCHMARK(BM_OptimizeThetaNumeric);

void BM_Simulate(benchmark::State& state) {
    const FiniteKernel kernel = builtin_kernel("statewalk", static_cast<int>(state.range(0)));
    const std::vector<double> thetas = {1.0};
    uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate(kernel, kernel.horizon(), thetas, seed++));
    }
}
BENCHMARK(BM_Simulate)->Arg(8)->Arg(32);

void BM_EstimateTail(benchmark::State& state) {
    const FiniteKernel kernel = builtin_kernel("walk1d", 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            estimate_tail_probability(kernel, 4, 2.0, 4.0, state.range(0), 7));
    }
}
BENCHMARK(BM_EstimateTail)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_ScalarWalkOracle(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(scalar_walk_oracle(40, 12.0, 40.0));
    }
}
BENCHMARK(BM_ScalarWalkOracle);

void BM_SupermartingaleCheck(benchmark::State& state) {
    const FiniteKernel kernel = builtin_kernel("walk1d", static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(check_supermartingale_exact(kernel, 1.0));
    }
}
BENCHMARK(BM_SupermartingaleCheck)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
