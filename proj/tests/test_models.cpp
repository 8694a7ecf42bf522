#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dqmesq/errors.hpp"
#include "dqmesq/models.hpp"
#include "dqmesq/propagate.hpp"
#include <unsupported/Eigen/MatrixFunctions>

#include "oracles.hpp"

using namespace dqmesq;

TEST_CASE("spin_boson high-T table is the tabulated pair") {
    const ModeSet set = paper_mode_table("spin_boson", "high");
    REQUIRE(set.size() == 2);
    CHECK(set.modes[0].eta == Complex(2.231, 1.155));
    CHECK(set.modes[0].gamma == Complex(0.500, 0.866));
    CHECK(set.modes[1].eta == Complex(1.769, -1.155));
    // C(0) = 4.000 exactly
    CHECK(eval_correlation(set, 0.0).real() == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(std::abs(eval_correlation(set, 0.0).imag()) < 1e-14);
}

TEST_CASE("spin_boson low-T table has three modes with a real third") {
    const ModeSet set = paper_mode_table("spin_boson", "low");
    REQUIRE(set.size() == 3);
    CHECK(set.modes[2].eta == Complex(-0.032, 0.0));
    CHECK(set.modes[2].gamma == Complex(3.873, 0.0));
    CHECK(set.pairing[2] == 2);   // real exponent self-pairs
}

TEST_CASE("siam tables carry both sigma branches") {
    const ModeSet low = paper_mode_table("siam", "low");
    REQUIRE(low.size() == 6);
    CHECK(low.modes[0].eta == Complex(0.062, -0.038));
    CHECK(low.modes[1].gamma == Complex(0.393, 0.0));
    const ModeSet high = paper_mode_table("siam", "high");
    bool found = false;
    for (const auto& m : high.modes)
        if (m.eta == Complex(0.0, 0.026) && m.gamma == Complex(3.261, 0.0)) found = true;
    CHECK(found);
    CHECK_THROWS_AS(paper_mode_table("siam", "tepid"), no_table_available);
}

TEST_CASE("dimer and diam tables are generated and flagged") {
    CHECK(paper_mode_table("excitonic_dimer", "").generated);
    CHECK(paper_mode_table("diam", "").generated);
    CHECK_THROWS_AS(paper_mode_table("unknown_model", ""), unknown_model);
}

TEST_CASE("every built-in job validates and builds") {
    for (const auto& [name, regime] :
         std::vector<std::pair<std::string, std::string>>{{"spin_boson", "high"},
                                                          {"spin_boson", "low"},
                                                          {"siam", "high"},
                                                          {"siam", "low"},
                                                          {"excitonic_dimer", ""},
                                                          {"diam", ""}}) {
        const ModelJob job = instantiate_model(name, regime);
        job.system.validate();
        CHECK(std::abs(job.rho0.trace() - Complex(1.0, 0.0)) < 1e-14);
        for (const auto& [label, mswc] : job.modesets) {
            mswc.set.validate();
            CHECK(mswc.set.size() == static_cast<index_t>(mswc.coeffs.zeta.size()));
        }
        if (name != "siam" && name != "diam") {   // fermionic generators are larger
            const Generator gen = job.build_generator();
            CHECK(gen.lambda.dim() == gen.layout.dim());
        }
    }
}

TEST_CASE("lambda = 0 override gives pure precession") {
    const ModelJob job = instantiate_model("spin_boson", "high", {{"lambda", 0.0}});
    const Generator gen = job.build_generator();
    RdtState state = job.initial_state(gen.layout);
    PropagationConfig cfg;
    cfg.dt = 0.01;
    cfg.t_final = 2.0;
    cfg.record_stride = 10;
    // spin-up along z with H = omega sigma_z + V sigma_x: population oscillates
    // unitarily; compare against the dense 2x2 propagator
    const Eigen::MatrixXcd h = job.system.hamiltonian.dense();
    double worst = 0.0;
    propagate(gen, state, cfg, [&](double t, const RdtState& s) {
        const Eigen::MatrixXcd u = (Complex(0.0, -1.0) * t * h).exp();
        const Eigen::MatrixXcd expected = u * job.rho0 * u.adjoint();
        worst = std::max(worst, (reduced_density(s) - expected).cwiseAbs().maxCoeff());
    });
    CHECK(worst < 1e-7);
}

TEST_CASE("unknown names are rejected") {
    CHECK_THROWS_AS(instantiate_model("kondo_lattice", ""), unknown_model);
    CHECK_THROWS_AS(instantiate_model("spin_boson", "high", {{"coupling_strength", 1.0}}),
                    unknown_parameter);
}

TEST_CASE("siam layout: 6 paired registers, double occupancy start") {
    const ModelJob job = instantiate_model("siam", "low");
    CHECK(job.fock.mode_count() == 6);
    CHECK(job.system.dim == 4);
    CHECK(job.rho0(3, 3).real() == doctest::Approx(1.0));
    CHECK(job.epsilon == doctest::Approx(0.005));
}

TEST_CASE("diam defaults follow the two-impurity parameter set") {
    const ModelJob job = instantiate_model("diam", "");
    CHECK(job.system.dim == 16);
    CHECK(job.parameters.at("U") == doctest::Approx(12.0));
    CHECK(job.parameters.at("t_hop") == doctest::Approx(10.0));
    CHECK(job.parameters.at("W") == doctest::Approx(50.0));
    CHECK(job.parameters.at("eps_imp") == doctest::Approx(-18.0));
    CHECK(job.initial_state_assumed);
    // |1up 1down 0 0> is basis index 12
    CHECK(job.rho0(12, 12).real() == doctest::Approx(1.0));
}
