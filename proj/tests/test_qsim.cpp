#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "dqmesq/errors.hpp"
#include "dqmesq/models.hpp"
#include "dqmesq/propagate.hpp"
#include "dqmesq/qsim.hpp"
#include "oracles.hpp"

using namespace dqmesq;

TEST_CASE("register arithmetic for the spin-boson layout") {
    // d=2, K=3 modes at N_max=3: 1 + 1 + 3*2 = 8 data qubits + ancilla
    ModelJob job = instantiate_model("spin_boson", "low");
    const Generator gen = job.build_generator();
    const RegisterLayout layout = make_register_layout(gen.layout);
    CHECK(layout.data_qubits == 8);
    CHECK(layout.total_qubits == 9);
    CHECK(layout.data_dim == 256);
}

TEST_CASE("encoding a pure product state gives one amplitude and Z = 1") {
    ModelJob job = instantiate_model("spin_boson", "high");
    const Generator gen = job.build_generator();
    const RegisterLayout layout = make_register_layout(gen.layout);
    const RdtState state = job.initial_state(gen.layout);   // |1><1| x vacuum
    const QubitState psi = encode_rdt(state, layout);
    CHECK(psi.z_ledger == doctest::Approx(1.0));
    int nonzero = 0;
    for (index_t i = 0; i < psi.amplitudes.size(); ++i)
        if (std::abs(psi.amplitudes[i]) > 0.0) ++nonzero;
    CHECK(nonzero == 1);
    // ancilla |0>: upper half empty
    CHECK(psi.amplitudes.tail(layout.data_dim).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("decode(encode) round-trips including the norm ledger") {
    std::mt19937_64 rng(3);
    ModelJob job = instantiate_model("spin_boson", "high");
    const Generator gen = job.build_generator();
    const RegisterLayout layout = make_register_layout(gen.layout);
    RdtState state = RdtState::zero(gen.layout);
    state.data = oracles::random_vector(gen.layout.dim(), rng);
    const QubitState psi = encode_rdt(state, layout);
    CHECK(std::abs(psi.amplitudes.norm() - 1.0) < 1e-12);
    const RdtState back = decode_rdt(psi, layout, gen.layout);
    CHECK((back.data - state.data).cwiseAbs().maxCoeff() < 1e-14);
    RdtState zero = RdtState::zero(gen.layout);
    CHECK_THROWS_AS(encode_rdt(zero, layout), zero_state);
}

TEST_CASE("tier-capped layouts embed as a register subspace") {
    std::mt19937_64 rng(5);
    SystemSpec sys;
    sys.dim = 2;
    sys.stats = Statistics::bosonic;
    sys.hamiltonian = pauli_z();
    sys.couplings = {{"env", pauli_x()}};
    std::map<std::string, ModeSetWithCoeffs> ms;
    const Complex g(0.5, 0.9);
    ms["env"] = with_coefficients(
        pair_conjugates({{{0.4, 0.1}, g, 0}, {{0.4, -0.1}, std::conj(g), 0}}, 1e-10));
    FockLayout fock{Statistics::bosonic, {2, 2}, 2};   // binding tier cap
    const Generator gen = build_lambda_bosonic(sys, ms, fock);
    const RegisterLayout layout = make_register_layout(gen.layout);
    CHECK(layout.data_qubits == 1 + 1 + 2 + 2);
    RdtState state = RdtState::zero(gen.layout);
    state.data = oracles::random_vector(gen.layout.dim(), rng);
    const QubitState psi = encode_rdt(state, layout);
    const RdtState back = decode_rdt(psi, layout, gen.layout);
    CHECK((back.data - state.data).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("split_generator produces Hermitian / anti-Hermitian parts") {
    ModelJob job = instantiate_model("spin_boson", "high");
    const Generator gen = job.build_generator();
    const auto [l0, l1] = split_generator(gen.lambda);
    CHECK((l0 - l0.adjoint()).max_abs() < 1e-13);
    CHECK((l1 + l1.adjoint()).max_abs() < 1e-13);
    CHECK(((l0 + l1) - gen.lambda).max_abs() < 1e-13);

    // Hermitian lambda -> lambda1 = 0
    const SparseOperator herm = SparseOperator::from_dense(
        oracles::random_hermitian(4, *(new std::mt19937_64(7))));
    const auto [h0, h1] = split_generator(herm);
    CHECK(h1.max_abs() < 1e-15);

    // -i diag(gamma) -> lambda0 = 0
    const SparseOperator decay = SparseOperator::from_entries(
        2, {{0, 0, {0.0, -0.3}}, {1, 1, {0.0, -0.9}}});
    const auto [d0, d1] = split_generator(decay);
    CHECK(d0.max_abs() < 1e-15);
    CHECK((d1 - decay).max_abs() < 1e-15);
}

TEST_CASE("closed system: one LCU step is exp(-i Lambda0 dt) up to sin(eps)/eps in Z") {
    const Generator gen = [] {
        SystemSpec sys;
        sys.dim = 2;
        sys.stats = Statistics::bosonic;
        sys.hamiltonian = pauli_z().scaled(1.0) + pauli_x().scaled(0.6);
        sys.couplings = {{"env", pauli_x()}};
        std::map<std::string, ModeSetWithCoeffs> ms;
        // eta = 0: no coupling, gamma enters only through the (empty) mode
        ms["env"] = with_coefficients(pair_conjugates({{{0.0, 0.0}, {1.0, 0.0}, 0}}, 1e-10));
        FockLayout fock{Statistics::bosonic, {1}, std::nullopt};
        return build_lambda_bosonic(sys, ms, fock);
    }();
    const RegisterLayout layout = make_register_layout(gen.layout);
    LcuConfig cfg;
    cfg.epsilon = 0.1;
    cfg.dt = 0.05;
    LcuEngine engine(gen, layout, cfg);

    Eigen::MatrixXcd rho0(2, 2);
    rho0 << 0.5, 0.5, 0.5, 0.5;
    const RdtState state = RdtState::from_reduced_density(gen.layout, rho0);
    QubitState psi = encode_rdt(state, layout);
    engine.step(psi);
    const RdtState out = decode_rdt(psi, layout, gen.layout);

    // the identity LCU branch contributes sin(eps)/eps, absorbed into Z;
    // Lambda1 = 0 only on the populated (vacuum) sector here, and the decoded
    // state must match the padded exact exponential on that sector
    const SparseOperator padded = gen.lambda.scattered(layout.data_dim, layout.scatter);
    const auto [l0, l1] = split_generator(padded);
    Eigen::VectorXcd exact = Eigen::VectorXcd::Zero(layout.data_dim);
    for (index_t i = 0; i < gen.layout.dim(); ++i) exact[layout.scatter[i]] = state.data[i];
    exact = (Complex(0.0, -1.0) * cfg.dt * l0.dense()).exp() * exact;
    exact *= std::sin(cfg.epsilon) / cfg.epsilon;
    for (index_t i = 0; i < gen.layout.dim(); ++i)
        CHECK(std::abs(out.data[i] - exact[layout.scatter[i]]) < 1e-12);
}

TEST_CASE("single decaying mode: one step reproduces exp(-gamma dt) occupations") {
    // pure-decay generator: d=1 system, one mode, eta = 0
    SystemSpec sys;
    sys.dim = 1;
    sys.stats = Statistics::bosonic;
    sys.hamiltonian = SparseOperator::identity(1).scaled(0.0);
    sys.couplings = {{"env", SparseOperator::identity(1).scaled(0.0)}};
    std::map<std::string, ModeSetWithCoeffs> ms;
    ms["env"] = with_coefficients(pair_conjugates({{{0.0, 0.0}, {0.7, 0.0}, 0}}, 1e-10));
    FockLayout fock{Statistics::bosonic, {3}, std::nullopt};
    const Generator gen = build_lambda_bosonic(sys, ms, fock);
    const RegisterLayout layout = make_register_layout(gen.layout);

    LcuConfig cfg;
    cfg.epsilon = 0.05;
    cfg.dt = 0.02;
    LcuEngine engine(gen, layout, cfg);
    RdtState state = RdtState::zero(gen.layout);
    state.data.setOnes();
    QubitState psi = encode_rdt(state, layout);
    engine.step(psi);
    const RdtState out = decode_rdt(psi, layout, gen.layout);
    // oracle: dense exp(-i Lambda dt) on the unpadded generator
    const Eigen::VectorXcd oracle =
        (Complex(0.0, -1.0) * cfg.dt * gen.lambda.dense()).exp() * state.data;
    const double err = (out.data - oracle).cwiseAbs().maxCoeff();
    CHECK(err < cfg.epsilon * cfg.epsilon + cfg.dt * cfg.dt);
    CHECK(err > 0.0);
}

TEST_CASE("spin-boson per-step deviation from the classical propagator") {
    ModelJob job = instantiate_model("spin_boson", "high");
    const Generator gen = job.build_generator();
    const RegisterLayout layout = make_register_layout(gen.layout);
    LcuConfig cfg;
    cfg.epsilon = 0.05;
    cfg.dt = 0.01;
    LcuEngine engine(gen, layout, cfg);

    const RdtState state = job.initial_state(gen.layout);
    QubitState psi = encode_rdt(state, layout);
    engine.step(psi);
    const RdtState stepped = decode_rdt(psi, layout, gen.layout);

    RdtState classical = state;
    PropagationConfig pc;
    pc.dt = cfg.dt;
    pc.t_final = cfg.dt;
    pc.method = PropagationMethod::dense_exponential;
    propagate(gen, classical, pc, nullptr);
    CHECK((stepped.data - classical.data).cwiseAbs().maxCoeff() < 5e-4);
}

TEST_CASE("run_lcu reproduces the classical spin-boson trajectory to 5e-3") {
    ModelJob job = instantiate_model("spin_boson", "high");
    const Generator gen = job.build_generator();
    const ObservableSpec spec = parse_observables({"P1_minus_P0"}, 2);

    PropagationConfig pc;
    pc.dt = 0.01;
    pc.t_final = 10.0;
    pc.record_stride = 20;
    const Trajectory classical =
        propagate_recorded(gen, job.initial_state(gen.layout), pc, spec);

    LcuConfig lc;
    lc.epsilon = 0.05;
    lc.dt = 0.01;
    std::vector<double> qsim_vals;
    run_lcu(gen, job.initial_state(gen.layout), lc, 10.0, 20,
            [&](double, const RdtState& s) {
                qsim_vals.push_back(
                    evaluate_observables(s, spec, job.system, gen.flat_modes)[0]);
            });
    REQUIRE(qsim_vals.size() == classical.rows.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < qsim_vals.size(); ++i)
        worst = std::max(worst, std::abs(qsim_vals[i] - classical.rows[i][0]));
    CHECK(worst < 5e-3);
}

TEST_CASE("t_final = 0 returns the initial state exactly") {
    ModelJob job = instantiate_model("spin_boson", "high");
    const Generator gen = job.build_generator();
    LcuConfig lc;
    int calls = 0;
    run_lcu(gen, job.initial_state(gen.layout), lc, 0.0, 1, [&](double t, const RdtState& s) {
        ++calls;
        CHECK(t == 0.0);
        CHECK((reduced_density_raw(s) - job.rho0).cwiseAbs().maxCoeff() < 1e-14);
    });
    CHECK(calls == 1);
}

TEST_CASE("decoded reduced density has unit trace after readout renormalization") {
    ModelJob job = instantiate_model("spin_boson", "low");
    const Generator gen = job.build_generator();
    LcuConfig lc;
    lc.epsilon = 0.05;
    lc.dt = 0.01;
    run_lcu(gen, job.initial_state(gen.layout), lc, 0.5, 10, [&](double, const RdtState& s) {
        CHECK(std::abs(reduced_density(s).trace() - Complex(1.0, 0.0)) < 1e-14);
    });
}

TEST_CASE("epsilon error scales quadratically") {
    // measured against the epsilon -> 0 limit of the same stepper; against
    // the classical oracle the (larger, opposite-signed) dt-splitting error
    // would mask the quadratic law
    ModelJob job = instantiate_model("spin_boson", "high");
    const Generator gen = job.build_generator();
    const ObservableSpec spec = parse_observables({"P1_minus_P0"}, 2);

    auto lcu_run = [&](double eps) {
        LcuConfig lc;
        lc.epsilon = eps;
        lc.dt = 0.01;
        std::vector<double> vals;
        run_lcu(gen, job.initial_state(gen.layout), lc, 4.0, 25,
                [&](double, const RdtState& s) {
                    vals.push_back(
                        evaluate_observables(s, spec, job.system, gen.flat_modes)[0]);
                });
        return vals;
    };
    const std::vector<double> reference = lcu_run(0.025 / 100.0);
    std::vector<double> errs;
    for (double eps : {0.1, 0.05, 0.025}) {
        const auto vals = lcu_run(eps);
        double worst = 0.0;
        for (std::size_t i = 0; i < vals.size(); ++i)
            worst = std::max(worst, std::abs(vals[i] - reference[i]));
        errs.push_back(worst);
    }
    const double r1 = errs[0] / errs[1];
    const double r2 = errs[1] / errs[2];
    CHECK(r1 > 3.0);
    CHECK(r1 < 5.0);
    CHECK(r2 > 3.0);
    CHECK(r2 < 5.0);
}

TEST_CASE("dt stepping error drops by [1.7, 4.5] per halving at fixed epsilon") {
    ModelJob job = instantiate_model("spin_boson", "high");
    const Generator gen = job.build_generator();
    const ObservableSpec spec = parse_observables({"P1_minus_P0"}, 2);

    auto lcu_error = [&](double dt) {
        PropagationConfig pc;
        pc.dt = dt;
        pc.t_final = 2.0;
        pc.record_stride = static_cast<index_t>(std::llround(0.5 / dt));
        const Trajectory classical =
            propagate_recorded(gen, job.initial_state(gen.layout), pc, spec);
        LcuConfig lc;
        lc.epsilon = 0.004;   // small enough that stepping dominates
        lc.dt = dt;
        double worst = 0.0;
        std::size_t i = 0;
        run_lcu(gen, job.initial_state(gen.layout), lc, 2.0, pc.record_stride,
                [&](double, const RdtState& s) {
                    const double v =
                        evaluate_observables(s, spec, job.system, gen.flat_modes)[0];
                    worst = std::max(worst, std::abs(v - classical.rows[i++][0]));
                });
        return worst;
    };
    const double e1 = lcu_error(0.04);
    const double e2 = lcu_error(0.02);
    const double e3 = lcu_error(0.01);
    CHECK(e1 / e2 > 1.7);
    CHECK(e1 / e2 < 4.5);
    CHECK(e2 / e3 > 1.7);
    CHECK(e2 / e3 < 4.5);
}

TEST_CASE("trotter backend converges to the exact backend as dt -> 0") {
    ModelJob job = instantiate_model("spin_boson", "high", {{"t_final", 1.0}});
    const Generator gen = job.build_generator(/*keep_terms=*/true);
    const ObservableSpec spec = parse_observables({"P1_minus_P0"}, 2);

    auto backend_gap = [&](double dt) {
        std::vector<double> exact_vals, trotter_vals;
        for (LcuBackend backend : {LcuBackend::exact_exponential, LcuBackend::trotter1}) {
            LcuConfig lc;
            lc.epsilon = 0.05;
            lc.dt = dt;
            lc.backend = backend;
            auto& sink = backend == LcuBackend::exact_exponential ? exact_vals : trotter_vals;
            run_lcu(gen, job.initial_state(gen.layout), lc, 1.0,
                    static_cast<index_t>(std::llround(0.25 / dt)),
                    [&](double, const RdtState& s) {
                        sink.push_back(
                            evaluate_observables(s, spec, job.system, gen.flat_modes)[0]);
                    });
        }
        double worst = 0.0;
        for (std::size_t i = 0; i < exact_vals.size(); ++i)
            worst = std::max(worst, std::abs(exact_vals[i] - trotter_vals[i]));
        return worst;
    };
    const double g1 = backend_gap(0.02);
    const double g2 = backend_gap(0.01);
    CHECK(g1 / g2 >= 1.7);
}

TEST_CASE("fermionic qsim matches the classical path on a small impurity") {
    ModelJob job = instantiate_model("siam", "low");
    ModeSet table = paper_mode_table("siam", "low");
    ModeSet reduced = pair_conjugates({table.modes[0], table.modes[3]}, 1e-6);
    job.modesets["res:up"] = with_coefficients(reduced);
    job.modesets["res:down"] = with_coefficients(reduced);
    job.fock = FockLayout{Statistics::fermionic, {1, 1}, std::nullopt};
    const Generator gen = job.build_generator();
    const RegisterLayout layout = make_register_layout(gen.layout);
    CHECK(layout.data_qubits == 8);   // 2+2 system + 2+2 mode qubits

    const ObservableSpec spec = parse_observables({"P0"}, 4);
    PropagationConfig pc;
    pc.dt = 0.01;
    pc.t_final = 3.0;
    pc.record_stride = 30;
    const Trajectory classical =
        propagate_recorded(gen, job.initial_state(gen.layout), pc, spec);
    LcuConfig lc;
    lc.epsilon = 0.005;
    lc.dt = 0.01;
    double worst = 0.0;
    std::size_t i = 0;
    run_lcu(gen, job.initial_state(gen.layout), lc, 3.0, 30, [&](double, const RdtState& s) {
        const double v = evaluate_observables(s, spec, job.system, gen.flat_modes)[0];
        worst = std::max(worst, std::abs(v - classical.rows[i++][0]));
    });
    CHECK(worst < 5e-3);
}

TEST_CASE("sampled measurement mode is seeded and reproducible") {
    ModelJob job = instantiate_model("spin_boson", "high");
    const Generator gen = job.build_generator();
    auto run_once = [&](std::uint64_t seed) {
        LcuConfig lc;
        lc.epsilon = 0.2;   // low success probability provokes retries
        lc.dt = 0.01;
        lc.sampled_measurement = true;
        lc.seed = seed;
        index_t retries = 0;
        Eigen::VectorXcd last;
        run_lcu(gen, job.initial_state(gen.layout), lc, 0.3, 30,
                [&](double, const RdtState& s) { last = s.data; }, &retries);
        return std::pair{retries, last};
    };
    const auto [r1, v1] = run_once(1234);
    const auto [r2, v2] = run_once(1234);
    CHECK(r1 == r2);
    CHECK((v1 - v2).cwiseAbs().maxCoeff() == 0.0);
    CHECK(r1 > 0);   // epsilon = 0.2 gives ~4 eps^2 = 16% success per step
}

TEST_CASE("circuit dump lists the gate sequence") {
    ModelJob job = instantiate_model("spin_boson", "high");
    const Generator gen = job.build_generator(true);
    const RegisterLayout layout = make_register_layout(gen.layout);
    LcuConfig lc;
    const LcuEngine exact(gen, layout, lc);
    const auto gates = exact.circuit();
    REQUIRE(gates.size() == 6);
    CHECK(gates.front().name == "H");
    CHECK(gates[1].name == "U0");
    CHECK(gates.back().name == "PROJECT");

    lc.backend = LcuBackend::trotter1;
    const LcuEngine trotter(gen, layout, lc);
    CHECK(trotter.circuit().size() > 10);
}
