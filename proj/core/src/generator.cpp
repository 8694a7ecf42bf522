#include "dqmesq/generator.hpp"

#include <cmath>
#include <numeric>

#include "dqmesq/errors.hpp"

namespace dqmesq {

namespace {

struct FlattenedMode {
    index_t coupling;
    std::string label;
    // bosonic: one entry per mode; fermionic: one entry per (+,-) pair
    ExpMode plus;       // bosonic mode, or the sigma=+ member
    ExpMode minus;      // fermionic sigma=- member
    Complex eta_bar;    // bosonic: eta of the conjugate partner
    Complex zeta_p, xi_p, zeta_m, xi_m;   // fermionic
    Complex zeta, xi;                     // bosonic
    int cap = 1;
};

std::vector<FlattenedMode> flatten_bosonic(const SystemSpec& sys,
                                           const std::map<std::string, ModeSetWithCoeffs>& modesets) {
    std::vector<FlattenedMode> flat;
    for (index_t u = 0; u < static_cast<index_t>(sys.couplings.size()); ++u) {
        const auto it = modesets.find(sys.couplings[u].label);
        if (it == modesets.end())
            throw missing_mode_set("no mode set for coupling " + sys.couplings[u].label);
        const auto& [set, coeffs] = it->second;
        if (set.stats != Statistics::bosonic)
            throw config_error("bosonic generator fed fermionic modes");
        for (index_t k = 0; k < set.size(); ++k) {
            FlattenedMode fm;
            fm.coupling = u;
            fm.label = sys.couplings[u].label;
            fm.plus = set.modes[k];
            fm.eta_bar = set.modes[set.pairing[k]].eta;
            fm.zeta = coeffs.zeta[k];
            fm.xi = coeffs.xi[k];
            flat.push_back(fm);
        }
    }
    return flat;
}

std::vector<FlattenedMode> flatten_fermionic(const SystemSpec& sys,
                                             const std::map<std::string, ModeSetWithCoeffs>& modesets) {
    std::vector<FlattenedMode> flat;
    for (index_t u = 0; u < static_cast<index_t>(sys.couplings.size()); ++u) {
        const auto it = modesets.find(sys.couplings[u].label);
        if (it == modesets.end())
            throw missing_mode_set("no mode set for coupling " + sys.couplings[u].label);
        const auto& [set, coeffs] = it->second;
        if (set.stats != Statistics::fermionic)
            throw unpaired_sigma("fermionic generator fed bosonic modes");
        for (index_t k = 0; k < set.size(); ++k) {
            if (set.modes[k].sigma != 1) continue;   // iterate pairs via the + member
            const index_t kb = set.pairing[k];
            FlattenedMode fm;
            fm.coupling = u;
            fm.label = sys.couplings[u].label;
            fm.plus = set.modes[k];
            fm.minus = set.modes[kb];
            fm.eta_bar = set.modes[kb].eta;
            fm.zeta_p = coeffs.zeta[k];
            fm.xi_p = coeffs.xi[k];
            fm.zeta_m = coeffs.zeta[kb];
            fm.xi_m = coeffs.xi[kb];
            flat.push_back(fm);
        }
    }
    return flat;
}

std::vector<FlatMode> provenance(const std::vector<FlattenedMode>& flat) {
    std::vector<FlatMode> out;
    out.reserve(flat.size());
    for (const auto& fm : flat) {
        FlatMode p;
        p.label = fm.label;
        p.coupling = fm.coupling;
        p.gamma = fm.plus.gamma;
        p.gamma_plus = fm.plus.gamma;
        p.gamma_minus = fm.minus.gamma;
        p.eta = fm.plus.eta;
        p.eta_bar_conj = std::conj(fm.eta_bar);
        p.zeta = fm.zeta;
        p.xi = fm.xi;
        p.zeta_p = fm.zeta_p;
        p.zeta_m = fm.zeta_m;
        p.xi_p = fm.xi_p;
        p.xi_m = fm.xi_m;
        out.push_back(p);
    }
    return out;
}

} // namespace

Generator build_lambda_bosonic(const SystemSpec& sys,
                               const std::map<std::string, ModeSetWithCoeffs>& modesets,
                               const FockLayout& layout, bool keep_terms) {
    sys.validate();
    layout.validate();
    if (layout.stats != Statistics::bosonic)
        throw config_error("bosonic generator needs a bosonic layout");
    auto flat = flatten_bosonic(sys, modesets);
    if (static_cast<index_t>(flat.size()) != layout.mode_count())
        throw dimension_mismatch("layout has " + std::to_string(layout.mode_count()) +
                                 " modes but the flattened mode list has " +
                                 std::to_string(flat.size()));

    Generator gen;
    gen.layout = RdtLayout{Statistics::bosonic, sys.dim, 0, layout};
    gen.system = sys;
    gen.flat_modes = provenance(flat);

    const index_t d2 = sys.dim * sys.dim;
    const SparseOperator i_cfg = SparseOperator::identity(layout.config_count());
    const SparseOperator i_sys2 = SparseOperator::identity(d2);

    std::vector<SparseOperator::Entry> accum;
    auto add_term = [&](const std::string& name, const SparseOperator& sys_part, int mode,
                        const SparseOperator& mode_part) {
        SparseOperator full =
            (mode < 0) ? SparseOperator::kron(sys_part, i_cfg)
                       : SparseOperator::kron(sys_part, embed_operator(mode_part, mode, layout));
        accum.insert(accum.end(), full.entries().begin(), full.entries().end());
        if (keep_terms) gen.terms.push_back({name, full, sys_part, mode, mode_part});
    };

    const SparseOperator h_comm = lift_system_superop(sys.hamiltonian, Side::left, sys.dim) -
                                  lift_system_superop(sys.hamiltonian, Side::right, sys.dim);
    add_term("H_S", h_comm, -1, {});

    for (std::size_t k = 0; k < flat.size(); ++k) {
        const auto& fm = flat[k];
        const auto [b_lower, b_raise] = boson_ladder(layout.caps[k]);
        const SparseOperator n_op = b_raise * b_lower;
        const auto& q = sys.couplings[fm.coupling].op;
        const SparseOperator q_comm = lift_system_superop(q, Side::left, sys.dim) -
                                      lift_system_superop(q, Side::right, sys.dim);
        const SparseOperator q_anti = lift_system_superop(q, Side::left, sys.dim) +
                                      lift_system_superop(q, Side::right, sys.dim);
        const std::string suffix = "[" + fm.label + "," + std::to_string(k) + "]";
        add_term("decay" + suffix, i_sys2.scaled(Complex(0.0, -1.0) * fm.plus.gamma),
                 static_cast<int>(k), n_op);
        add_term("zeta" + suffix, q_comm.scaled(fm.zeta), static_cast<int>(k),
                 b_lower + b_raise);
        add_term("xi" + suffix, q_anti.scaled(Complex(0.0, 1.0) * fm.xi),
                 static_cast<int>(k), b_raise);
    }
    gen.lambda = SparseOperator::from_entries(gen.layout.dim(), std::move(accum));
    return gen;
}

Generator build_lambda_fermionic(const SystemSpec& sys,
                                 const std::map<std::string, ModeSetWithCoeffs>& modesets,
                                 bool keep_terms, const std::vector<int>& mode_order) {
    sys.validate();
    if (sys.stats != Statistics::fermionic)
        throw config_error("fermionic generator needs fermionic statistics");
    auto flat = flatten_fermionic(sys, modesets);
    if (!mode_order.empty()) {
        if (mode_order.size() != flat.size()) throw dimension_mismatch("mode_order size");
        std::vector<FlattenedMode> reordered;
        for (int idx : mode_order) reordered.push_back(flat.at(idx));
        flat = std::move(reordered);
    }
    const int K = static_cast<int>(flat.size());
    const int n_orb = static_cast<int>(std::llround(std::log2(double(sys.dim))));
    if ((index_t{1} << n_orb) != sys.dim)
        throw config_error("fermionic system dim must be a power of two (JW orbitals)");

    Generator gen;
    FockLayout side_fock{Statistics::fermionic, std::vector<int>(K, 1), std::nullopt};
    gen.layout = RdtLayout{Statistics::fermionic, sys.dim, n_orb, side_fock};
    gen.system = sys;
    gen.flat_modes = provenance(flat);

    // Combined side space: orbitals first, then modes, one JW code per side.
    // Dissipaton ladder matrices carry mode-internal strings only; the
    // cross-register parity bookkeeping of the occupation-number hierarchy is
    // realized by explicit mode-parity dressings P = (-1)^{mode occupation},
    // placed per term as fixed by the recast hierarchy equations.
    const index_t side = gen.layout.side_dim();
    const index_t modes_dim = index_t{1} << K;
    const SparseOperator i_side = SparseOperator::identity(side);
    const SparseOperator i_orb = SparseOperator::identity(sys.dim);
    const SparseOperator i_modes = SparseOperator::identity(modes_dim);

    // mode-register JW ladder (no orbital string) and mode parity, on V
    auto side_mode = [&](int k) {
        auto [l, r] = jw_ladder_site(K, k);
        return std::pair{SparseOperator::kron(i_orb, l), SparseOperator::kron(i_orb, r)};
    };
    SparseOperator parity;
    {
        SparseOperator z_modes = SparseOperator::identity(1);
        const SparseOperator z = SparseOperator::from_entries(
            2, {{0, 0, {1.0, 0.0}}, {1, 1, {-1.0, 0.0}}});
        for (int k = 0; k < K; ++k) z_modes = SparseOperator::kron(z_modes, z);
        parity = SparseOperator::kron(i_orb, z_modes);
    }

    std::vector<SparseOperator::Entry> accum;
    auto add_term = [&](const std::string& name, const SparseOperator& ket_part,
                        const SparseOperator& bra_part) {
        const SparseOperator& a = ket_part.dim() ? ket_part : i_side;
        const SparseOperator& b = bra_part.dim() ? bra_part : i_side;
        SparseOperator full = SparseOperator::kron(a, b.transpose());
        accum.insert(accum.end(), full.entries().begin(), full.entries().end());
        if (keep_terms) {
            GeneratorTerm t;
            t.name = name;
            t.op = full;
            t.ket_part = ket_part;
            t.bra_part = bra_part;
            gen.terms.push_back(std::move(t));
        }
    };

    const SparseOperator h_side = SparseOperator::kron(sys.hamiltonian, i_modes);
    add_term("H_S ket", h_side, {});
    add_term("H_S bra", {}, h_side.scaled(-1.0));

    for (int k = 0; k < K; ++k) {
        const auto& fm = flat[k];
        auto [b_lower, b_raise] = side_mode(k);
        const SparseOperator n_mode = b_raise * b_lower;
        const SparseOperator c_minus =
            SparseOperator::kron(sys.couplings[fm.coupling].op, i_modes);
        const SparseOperator c_plus = c_minus.adjoint();
        const std::string sfx = "[" + fm.label + "," + std::to_string(k) + "]";

        add_term("decay-" + sfx, n_mode.scaled(Complex(0.0, -1.0) * fm.minus.gamma), {});
        add_term("decay+" + sfx, {}, n_mode.scaled(Complex(0.0, -1.0) * fm.plus.gamma));

        add_term("zeta+a" + sfx, (c_minus * parity).scaled(fm.zeta_p), b_raise);
        add_term("zeta+b" + sfx, {}, (c_minus * b_raise * parity).scaled(-fm.zeta_p));
        add_term("zeta-a" + sfx, (c_plus * parity * b_lower).scaled(fm.zeta_m), {});
        add_term("zeta-b" + sfx, b_lower.scaled(-fm.zeta_m), c_plus * parity);

        add_term("xi+a" + sfx, (c_plus * parity).scaled(fm.xi_p), b_lower);
        add_term("xi+b" + sfx, b_raise.scaled(-std::conj(fm.xi_p)), c_minus * parity);
        add_term("xi-a" + sfx, (c_minus * parity * b_raise).scaled(-fm.xi_m), {});
        add_term("xi-b" + sfx, {}, (c_plus * b_lower * parity).scaled(std::conj(fm.xi_m)));
    }
    gen.lambda = SparseOperator::from_entries(gen.layout.dim(), std::move(accum));
    return gen;
}

} // namespace dqmesq
