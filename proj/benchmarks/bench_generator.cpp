#include <benchmark/benchmark.h>

#include "dqmesq/models.hpp"

using namespace dqmesq;

static void BM_build_lambda_bosonic(benchmark::State& state) {
    const ModelJob job = instantiate_model("spin_boson", "low");
    for (auto _ : state) {
        const Generator gen = job.build_generator();
        benchmark::DoNotOptimize(gen.lambda.nnz());
    }
}
BENCHMARK(BM_build_lambda_bosonic);

static void BM_build_lambda_fermionic(benchmark::State& state) {
    const ModelJob job = instantiate_model("siam", "low");
    for (auto _ : state) {
        const Generator gen = job.build_generator();
        benchmark::DoNotOptimize(gen.lambda.nnz());
    }
}
BENCHMARK(BM_build_lambda_fermionic)->Unit(benchmark::kMillisecond);
