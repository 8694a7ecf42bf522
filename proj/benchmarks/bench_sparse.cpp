#include <benchmark/benchmark.h>

#include "dqmesq/models.hpp"

using namespace dqmesq;

namespace {

const Generator& spin_boson_generator(int n_max) {
    static std::map<int, Generator> cache;
    auto it = cache.find(n_max);
    if (it == cache.end()) {
        const ModelJob job = instantiate_model(
            "spin_boson", "low", {{"n_max", double(n_max)}, {"tier_cap", double(n_max)}});
        it = cache.emplace(n_max, job.build_generator()).first;
    }
    return it->second;
}

} // namespace

static void BM_lambda_matvec(benchmark::State& state) {
    const Generator& gen = spin_boson_generator(static_cast<int>(state.range(0)));
    Eigen::VectorXcd x = Eigen::VectorXcd::Ones(gen.lambda.dim());
    Eigen::VectorXcd y(gen.lambda.dim());
    for (auto _ : state) {
        gen.lambda.apply(x.data(), y.data());
        benchmark::DoNotOptimize(y.data());
    }
    state.counters["dim"] = double(gen.lambda.dim());
    state.counters["nnz"] = double(gen.lambda.nnz());
}
BENCHMARK(BM_lambda_matvec)->Arg(2)->Arg(3)->Arg(5)->Arg(8);

static void BM_sparse_kron(benchmark::State& state) {
    const Generator& gen = spin_boson_generator(3);
    const SparseOperator id = SparseOperator::identity(16);
    for (auto _ : state) {
        auto k = SparseOperator::kron(gen.lambda, id);
        benchmark::DoNotOptimize(k.nnz());
    }
}
BENCHMARK(BM_sparse_kron);
