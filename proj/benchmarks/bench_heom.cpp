#include <benchmark/benchmark.h>

#include "dqmesq/heom.hpp"
#include "dqmesq/models.hpp"

using namespace dqmesq;

static void BM_heom_rhs_bosonic(benchmark::State& state) {
    const ModelJob job = instantiate_model("spin_boson", "low");
    const Generator gen = job.build_generator();
    Hierarchy h = Hierarchy::from_reduced_density(Statistics::bosonic, job.rho0,
                                                  gen.layout.fock);
    for (auto _ : state) {
        Hierarchy out = heom_rhs(h, job.system, gen.flat_modes);
        benchmark::DoNotOptimize(out.tier0().data());
    }
    state.counters["ados"] = double(h.block_count());
}
BENCHMARK(BM_heom_rhs_bosonic);

static void BM_heom_rhs_fermionic(benchmark::State& state) {
    const ModelJob job = instantiate_model("siam", "low");
    const Generator gen = job.build_generator();
    Hierarchy h = Hierarchy::from_reduced_density(Statistics::fermionic, job.rho0,
                                                  gen.layout.fock);
    for (auto _ : state) {
        Hierarchy out = heom_rhs(h, job.system, gen.flat_modes);
        benchmark::DoNotOptimize(out.tier0().data());
    }
    state.counters["ados"] = double(h.block_count());
}
BENCHMARK(BM_heom_rhs_fermionic)->Unit(benchmark::kMillisecond);
