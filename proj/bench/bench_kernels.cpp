#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "lmpred/model.hpp"
#include "lmpred/parallel.hpp"
#include "lmpred/simulate.hpp"
#include "lmpred/toeplitz.hpp"

using namespace lmpred;

namespace {

ProcessSpec fn(double d) {
    ProcessSpec s;
    s.d = d;
    return s;
}

void BM_SampleBatchSerial(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(sample_batch_serial(fn(0.3), n, 64, 1));
    state.SetItemsProcessed(state.iterations() * 64);
}

void BM_SampleBatchParallel(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(sample_batch(fn(0.3), n, 64, 1));
    state.SetItemsProcessed(state.iterations() * 64);
}

void BM_EmpiricalCovReference(benchmark::State& state) {
    const auto x = sample(fn(0.3), 1 << 16, 3).values;
    const auto k = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(empirical_cov_reference(x, k, k));
}

void BM_EmpiricalCov(benchmark::State& state) {
    const auto x = sample(fn(0.3), 1 << 16, 3).values;
    const auto k = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(empirical_cov(x, k, k));
}

void BM_ToeplitzMatvecReference(benchmark::State& state) {
    const auto J = static_cast<std::size_t>(state.range(0));
    const auto col = autocovariance(fn(0.3), J - 1);
    const std::vector<double> x(J, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(toeplitz_matvec_reference(col, x));
}

void BM_ToeplitzMatvec(benchmark::State& state) {
    const auto J = static_cast<std::size_t>(state.range(0));
    const auto col = autocovariance(fn(0.3), J - 1);
    const std::vector<double> x(J, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(toeplitz_matvec(col, x));
}

double body(std::size_t r) {
    double s = 0.0;
    for (std::size_t i = 1; i < 20000; ++i) s += std::sin(static_cast<double>(r * i));
    return s;
}

void BM_MapReplicatesSerial(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(map_replicates_serial<double>(256, body));
}

void BM_MapReplicates(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(map_replicates<double>(256, body));
}

}  // namespace

BENCHMARK(BM_SampleBatchSerial)->Arg(1 << 10)->Arg(1 << 14)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleBatchParallel)->Arg(1 << 10)->Arg(1 << 14)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EmpiricalCovReference)->Arg(2)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_EmpiricalCov)->Arg(2)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ToeplitzMatvecReference)->Arg(1 << 10)->Arg(1 << 13)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ToeplitzMatvec)->Arg(1 << 10)->Arg(1 << 13)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_MapReplicatesSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MapReplicates)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
