#include <benchmark/benchmark.h>

#include "brwsim/brw.hpp"
#include "brwsim/cholesky.hpp"
#include "brwsim/rng.hpp"
#include "brwsim/ssbrw.hpp"

using namespace brwsim;

static void BM_NextGaussian(benchmark::State& state) {
    RngStream stream(42);
    double acc = 0.0;
    for (auto _ : state) acc += stream.next_gaussian();
    benchmark::DoNotOptimize(acc);
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_NextGaussian);

static void BM_BrwMaxOnly(benchmark::State& state) {
    const TreeShape shape(2, static_cast<int>(state.range(0)));
    RngStream stream(42);
    double acc = 0.0;
    for (auto _ : state) acc += brw::walk_max(shape, stream);
    benchmark::DoNotOptimize(acc);
    state.SetItemsProcessed(state.iterations() * (leaf_count(shape) - 1) * 2);
}
BENCHMARK(BM_BrwMaxOnly)->Arg(8)->Arg(12)->Arg(16)->Arg(20);

static void BM_SwitchingMaxOnly(benchmark::State& state) {
    const TreeShape shape(2, static_cast<int>(state.range(0)));
    const auto mixing = ssbrw::build_level_mixing(shape);
    RngStream stream(42);
    double acc = 0.0;
    for (auto _ : state) acc += ssbrw::walk_max(mixing, stream).max;
    benchmark::DoNotOptimize(acc);
    state.SetItemsProcessed(state.iterations() * (leaf_count(shape) - 1));
}
BENCHMARK(BM_SwitchingMaxOnly)->Arg(8)->Arg(12)->Arg(16)->Arg(20);

static void BM_SwitchingMaxOnlyWide(benchmark::State& state) {
    const TreeShape shape(static_cast<int>(state.range(0)), 6);
    const auto mixing = ssbrw::build_level_mixing(shape);
    RngStream stream(42);
    double acc = 0.0;
    for (auto _ : state) acc += ssbrw::walk_max(mixing, stream).max;
    benchmark::DoNotOptimize(acc);
    state.SetItemsProcessed(state.iterations() * leaf_count(shape));
}
BENCHMARK(BM_SwitchingMaxOnlyWide)->Arg(3)->Arg(5);

static void BM_CholeskySmall(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    SmallSpdMatrix m(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m.at(i, j) = (i == j) ? 1.0 : -1.0 / dim;
    for (auto _ : state) {
        auto l = cholesky_small(m);
        benchmark::DoNotOptimize(l);
    }
}
BENCHMARK(BM_CholeskySmall)->Arg(2)->Arg(8)->Arg(32);

BENCHMARK_MAIN();
