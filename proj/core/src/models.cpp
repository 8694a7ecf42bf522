#include "dqmesq/models.hpp"

#include <cmath>

#include "dqmesq/errors.hpp"

namespace dqmesq {

namespace {

ModeSet spin_boson_table(const std::string& regime) {
    std::vector<ExpMode> modes;
    if (regime == "high") {
        modes = {{{2.231, 1.155}, {0.500, 0.866}, 0},
                 {{1.769, -1.155}, {0.500, -0.866}, 0}};
    } else if (regime == "low") {
        modes = {{{0.497, 0.082}, {0.500, 0.866}, 0},
                 {{0.035, -0.082}, {0.500, -0.866}, 0},
                 {{-0.032, 0.0}, {3.873, 0.0}, 0}};
    } else {
        throw no_table_available("spin_boson regimes: low, high");
    }
    return pair_conjugates(std::move(modes), 1e-6);
}

ModeSet siam_table(const std::string& regime) {
    std::vector<ExpMode> branch;
    if (regime == "low") {        // beta U = 8
        branch = {{{0.062, -0.038}, {1.000, 0.0}, 0},
                  {{0.0, -0.037}, {0.393, 0.0}, 0},
                  {{0.0, 0.075}, {1.630, 0.0}, 0}};
    } else if (regime == "high") {   // beta U = 4
        branch = {{{0.062, 0.138}, {1.000, 0.0}, 0},
                  {{0.0, -0.164}, {0.786, 0.0}, 0},
                  {{0.0, 0.026}, {3.261, 0.0}, 0}};
    } else {
        throw no_table_available("siam regimes: low, high");
    }
    // C^+(t) = C^-(t) for the symmetric impurity; duplicate per sigma
    std::vector<ExpMode> modes;
    for (const auto& m : branch) modes.push_back({m.eta, m.gamma, +1});
    for (const auto& m : branch) modes.push_back({m.eta, m.gamma, -1});
    return pair_conjugates(std::move(modes), 1e-6);
}

double param_or(const std::map<std::string, double>& p, const std::string& key,
                            double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

void reject_unknown(const std::map<std::string, double>& overrides,
                    std::initializer_list<const char*> known) {
    for (const auto& [k, v] : overrides) {
        bool ok = false;
        for (const char* name : known)
            if (k == name) ok = true;
        if (!ok) throw unknown_parameter(k);
    }
}

} // namespace

Generator ModelJob::build_generator(bool keep_terms) const {
    if (system.stats == Statistics::bosonic)
        return build_lambda_bosonic(system, modesets, fock, keep_terms);
    return build_lambda_fermionic(system, modesets, keep_terms);
}

RdtState ModelJob::initial_state(const RdtLayout& layout) const {
    return RdtState::from_reduced_density(layout, rho0);
}

ModeSet paper_mode_table(const std::string& name, const std::string& regime) {
    if (name == "spin_boson") return spin_boson_table(regime);
    if (name == "siam") return siam_table(regime);
    if (name == "excitonic_dimer") {
        SpectralDensity j{SpectralKind::drude, {{"lambda", 0.5}, {"gamma_d", 5.0}}, 1.0};
        ModeSet set = decompose_spectral_density(j, 2, Statistics::bosonic);
        set.generated = true;
        return set;
    }
    if (name == "diam") {
        SpectralDensity j{SpectralKind::lorentzian, {{"Gamma", 1.0}, {"W", 50.0}}, 5.0};
        ModeSet set = decompose_spectral_density(j, 1, Statistics::fermionic);
        set.generated = true;
        return set;
    }
    throw unknown_model(name);
}

ModelJob instantiate_model(const std::string& name, const std::string& regime,
                           const std::map<std::string, double>& overrides) {
    ModelJob job;
    job.model = name;
    job.regime = regime;

    if (name == "spin_boson") {
        reject_unknown(overrides, {"omega", "V", "lambda", "T", "n_max", "tier_cap", "dt",
                                   "t_final", "epsilon", "record_stride"});
        const double omega = param_or(overrides, "omega", 1.0);
        const double v = param_or(overrides, "V", 1.0);
        const double lambda = param_or(overrides, "lambda", 0.4);
        const int n_max = static_cast<int>(param_or(overrides, "n_max", 3));
        // tier truncation (sum of occupations <= L) is the stable scheme at
        // these coupling strengths; a bare per-mode cap has growing eigenmodes
        // in the high-temperature table. tier_cap < 0 disables the cap.
        const int tier = static_cast<int>(param_or(overrides, "tier_cap", n_max));
        job.system.dim = 2;
        job.system.stats = Statistics::bosonic;
        job.system.hamiltonian =
            pauli_z().scaled(omega) + pauli_x().scaled(v);
        // coupling strength lives in the tabulated eta (units Omega^2);
        // lambda scales the table linearly relative to the tabulated default 0.4
        job.system.couplings = {{"bath", pauli_z().scaled(1.0)}};
        ModeSet table = spin_boson_table(regime.empty() ? "high" : regime);
        const double scale = lambda / 0.4;
        for (auto& m : table.modes) m.eta *= scale;
        job.modesets["bath"] = with_coefficients(std::move(table));
        job.fock = FockLayout{Statistics::bosonic,
                              std::vector<int>(job.modesets["bath"].set.modes.size(), n_max),
                              tier >= 0 ? std::optional<int>(tier) : std::nullopt};
        job.rho0 = Eigen::MatrixXcd::Zero(2, 2);
        job.rho0(1, 1) = 1.0;   // spin-up |1>
        job.observables = {"P1_minus_P0"};
        job.dt = param_or(overrides, "dt", 0.01);
        job.t_final = param_or(overrides, "t_final", 10.0);
        job.epsilon = param_or(overrides, "epsilon", 0.05);
        job.record_stride =
            static_cast<index_t>(param_or(overrides, "record_stride", 10));
        job.parameters = {{"omega", omega}, {"V", v}, {"lambda", lambda},
                          {"T", regime == "low" ? 0.5 : 5.0}, {"n_max", double(n_max)}};
        return job;
    }

    if (name == "siam") {
        reject_unknown(overrides, {"U", "E0", "dt", "t_final", "epsilon", "record_stride"});
        const double u = param_or(overrides, "U", 1.0);
        const double e0 = param_or(overrides, "E0", -0.5 * u);
        job.system.dim = 4;   // orbitals (up, down)
        job.system.stats = Statistics::fermionic;
        const SparseOperator n_up = orbital_number(2, 0);
        const SparseOperator n_dn = orbital_number(2, 1);
        job.system.hamiltonian = (n_up + n_dn).scaled(e0) + (n_up * n_dn).scaled(u);
        job.system.couplings = {{"res:up", orbital_annihilation(2, 0)},
                                {"res:down", orbital_annihilation(2, 1)}};
        ModeSet table = siam_table(regime.empty() ? "low" : regime);
        job.modesets["res:up"] = with_coefficients(table);
        job.modesets["res:down"] = with_coefficients(table);
        const int pairs_per_orbital = static_cast<int>(table.modes.size()) / 2;
        job.fock = FockLayout{Statistics::fermionic,
                              std::vector<int>(2 * pairs_per_orbital, 1), std::nullopt};
        job.rho0 = Eigen::MatrixXcd::Zero(4, 4);
        job.rho0(3, 3) = 1.0;   // double occupancy |11>
        job.observables = {"populations"};
        job.dt = param_or(overrides, "dt", 0.01);
        job.t_final = param_or(overrides, "t_final", 10.0);
        job.epsilon = param_or(overrides, "epsilon", 0.005);
        job.record_stride =
            static_cast<index_t>(param_or(overrides, "record_stride", 10));
        job.parameters = {{"U", u}, {"E0", e0}, {"W", u}, {"Gamma", u / 8.0},
                          {"betaU", regime == "high" ? 4.0 : 8.0}};
        return job;
    }

    if (name == "excitonic_dimer") {
        reject_unknown(overrides, {"V", "eps1", "eps2", "lambda", "gamma_d", "T", "K",
                                   "n_max", "tier_cap", "dt", "t_final", "epsilon",
                                   "record_stride"});
        const double v = param_or(overrides, "V", 1.0);
        const double e1 = param_or(overrides, "eps1", 1.0);
        const double e2 = param_or(overrides, "eps2", 1.0);
        const double lambda = param_or(overrides, "lambda", 0.5);
        const double gd = param_or(overrides, "gamma_d", 5.0);
        const double temp = param_or(overrides, "T", 1.0);
        const int kk = static_cast<int>(param_or(overrides, "K", 2));
        const int n_max = static_cast<int>(param_or(overrides, "n_max", 3));
        // states |0>, |1>, |2>; double excitation neglected
        job.system.dim = 3;
        job.system.stats = Statistics::bosonic;
        job.system.hamiltonian = SparseOperator::from_entries(
            3, {{1, 1, {e1, 0.0}}, {2, 2, {e2, 0.0}}, {1, 2, {v, 0.0}}, {2, 1, {v, 0.0}}});
        const SparseOperator p1 = SparseOperator::from_entries(3, {{1, 1, {1.0, 0.0}}});
        const SparseOperator p2 = SparseOperator::from_entries(3, {{2, 2, {1.0, 0.0}}});
        job.system.couplings = {{"env:1", p1}, {"env:2", p2}};
        const int tier = static_cast<int>(param_or(overrides, "tier_cap", n_max));
        SpectralDensity j{SpectralKind::drude, {{"lambda", lambda}, {"gamma_d", gd}}, temp};
        ModeSet set = decompose_spectral_density(j, kk, Statistics::bosonic);
        job.modesets["env:1"] = with_coefficients(set);
        job.modesets["env:2"] = with_coefficients(set);
        job.fock = FockLayout{Statistics::bosonic, std::vector<int>(2 * kk, n_max),
                              tier >= 0 ? std::optional<int>(tier) : std::nullopt};
        job.rho0 = Eigen::MatrixXcd::Zero(3, 3);
        job.rho0(1, 1) = 1.0;   // exciton 1 populated (inferred default)
        job.initial_state_assumed = true;
        job.generated_modes = true;
        job.observables = {"P1", "P2"};
        job.dt = param_or(overrides, "dt", 0.01);
        job.t_final = param_or(overrides, "t_final", 10.0);
        job.epsilon = param_or(overrides, "epsilon", 0.05);
        job.record_stride =
            static_cast<index_t>(param_or(overrides, "record_stride", 10));
        job.parameters = {{"V", v}, {"eps1", e1}, {"eps2", e2}, {"lambda", lambda},
                          {"gamma_d", gd}, {"T", temp}, {"K", double(kk)},
                          {"n_max", double(n_max)}};
        return job;
    }

    if (name == "diam") {
        reject_unknown(overrides, {"Delta", "U", "U_C", "t_hop", "T", "W", "dt", "t_final",
                                   "epsilon", "record_stride"});
        const double u = param_or(overrides, "U", 12.0);
        const double uc = param_or(overrides, "U_C", 12.0);
        const double th = param_or(overrides, "t_hop", 10.0);
        const double temp = param_or(overrides, "T", 5.0);
        const double w = param_or(overrides, "W", 50.0);
        const double eps_imp = -(u + 2.0 * uc) / 2.0;
        // orbitals (1up, 1down, 2up, 2down)
        job.system.dim = 16;
        job.system.stats = Statistics::fermionic;
        const auto n = [&](int o) { return orbital_number(4, o); };
        const auto c = [&](int o) { return orbital_annihilation(4, o); };
        SparseOperator h = (n(0) + n(1) + n(2) + n(3)).scaled(eps_imp) +
                           (n(0) * n(1)).scaled(u) + (n(2) * n(3)).scaled(u) +
                           ((n(0) + n(1)) * (n(2) + n(3))).scaled(uc);
        for (int s = 0; s < 2; ++s) {
            const SparseOperator hop = c(s).adjoint() * c(2 + s);
            h = h + hop.scaled(th) + hop.adjoint().scaled(th);
        }
        job.system.hamiltonian = h;
        job.system.couplings = {{"res:1up", c(0)}, {"res:1down", c(1)},
                                {"res:2up", c(2)}, {"res:2down", c(3)}};
        SpectralDensity j{SpectralKind::lorentzian, {{"Gamma", 1.0}, {"W", w}}, temp};
        ModeSet set = decompose_spectral_density(j, 1, Statistics::fermionic);
        job.modesets["res:1up"] = with_coefficients(set);
        job.modesets["res:1down"] = with_coefficients(set);
        job.modesets["res:2up"] = with_coefficients(set);
        job.modesets["res:2down"] = with_coefficients(set);
        job.fock = FockLayout{Statistics::fermionic, std::vector<int>(4, 1), std::nullopt};
        job.rho0 = Eigen::MatrixXcd::Zero(16, 16);
        job.rho0(12, 12) = 1.0;   // |1up 1down 0 0> (inferred default)
        job.initial_state_assumed = true;
        job.generated_modes = true;
        job.observables = {"P12", "P15"};   // P_1 and P_double projections
        // the reservoir rate W = 50 Delta sets the stiffness; dt = 0.01 sits
        // outside the rk4 stability region for this generator
        job.dt = param_or(overrides, "dt", 0.002);
        job.t_final = param_or(overrides, "t_final", 5.0);
        job.epsilon = param_or(overrides, "epsilon", 0.005);
        job.record_stride =
            static_cast<index_t>(param_or(overrides, "record_stride", 10));
        job.parameters = {{"U", u}, {"U_C", uc}, {"t_hop", th}, {"T", temp}, {"W", w},
                          {"eps_imp", eps_imp}};
        return job;
    }

    throw unknown_model(name);
}

} // namespace dqmesq
