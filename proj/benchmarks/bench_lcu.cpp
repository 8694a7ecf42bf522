#include <benchmark/benchmark.h>

#include "dqmesq/models.hpp"
#include "dqmesq/qsim.hpp"

using namespace dqmesq;

static void BM_lcu_step_exact(benchmark::State& state) {
    const ModelJob job = instantiate_model("spin_boson", "low");
    const Generator gen = job.build_generator();
    const RegisterLayout layout = make_register_layout(gen.layout);
    LcuConfig cfg;
    cfg.epsilon = 0.05;
    cfg.dt = 0.01;
    LcuEngine engine(gen, layout, cfg);
    QubitState psi = encode_rdt(job.initial_state(gen.layout), layout);
    for (auto _ : state) {
        engine.step(psi);
        benchmark::DoNotOptimize(psi.z_ledger);
    }
    state.counters["qubits"] = double(layout.total_qubits);
}
BENCHMARK(BM_lcu_step_exact);

static void BM_lcu_step_trotter(benchmark::State& state) {
    const ModelJob job = instantiate_model("spin_boson", "low");
    const Generator gen = job.build_generator(/*keep_terms=*/true);
    const RegisterLayout layout = make_register_layout(gen.layout);
    LcuConfig cfg;
    cfg.epsilon = 0.05;
    cfg.dt = 0.01;
    cfg.backend = LcuBackend::trotter1;
    LcuEngine engine(gen, layout, cfg);
    QubitState psi = encode_rdt(job.initial_state(gen.layout), layout);
    for (auto _ : state) {
        engine.step(psi);
        benchmark::DoNotOptimize(psi.z_ledger);
    }
}
BENCHMARK(BM_lcu_step_trotter);
