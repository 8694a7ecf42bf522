#include "dqmesq/pseudomode.hpp"

#include <cmath>

#include "dqmesq/errors.hpp"

namespace dqmesq {

namespace {

// identity (x) ... (x) op (x) ... over the pseudomode spaces only
SparseOperator embed_mode(const SparseOperator& op, int mode, const std::vector<int>& caps) {
    SparseOperator out = SparseOperator::identity(1);
    for (std::size_t k = 0; k < caps.size(); ++k)
        out = SparseOperator::kron(out, static_cast<int>(k) == mode
                                            ? op
                                            : SparseOperator::identity(caps[k] + 1));
    return out;
}

} // namespace

PseudomodeGenerator build_pseudomode_generator(const SystemSpec& sys, const ModeSet& modes,
                                               const std::vector<int>& caps, double imag_tol) {
    sys.validate();
    if (sys.couplings.size() != 1)
        throw config_error("pseudomode comparison supports a single coupling operator");
    if (caps.size() != modes.modes.size()) throw dimension_mismatch("pseudomode caps");
    for (const auto& m : modes.modes) {
        if (std::abs(m.eta.imag()) > imag_tol || std::abs(m.gamma.imag()) > imag_tol)
            throw complex_mode_rejected("pseudomode mapping requires real eta and gamma");
        if (m.eta.real() <= 0.0)
            throw complex_mode_rejected("pseudomode coupling sqrt(eta) requires eta > 0");
    }
    const auto coeffs = dissipaton_coefficients(modes);

    PseudomodeGenerator gen;
    gen.system_dim = sys.dim;
    gen.caps = caps;
    index_t dp = 1;
    for (int cap : caps) dp *= (cap + 1);
    gen.total_dim = sys.dim * dp;

    const SparseOperator i_modes = SparseOperator::identity(dp);
    const SparseOperator i_sys = SparseOperator::identity(sys.dim);

    // H_eff = H_S (x) I + sum_k zeta_k Q (x) (a_k^- + a_k^+)
    SparseOperator h_eff = SparseOperator::kron(sys.hamiltonian, i_modes);
    const auto& q = sys.couplings[0].op;
    std::vector<SparseOperator> a_lower_full, a_raise_full;
    for (std::size_t k = 0; k < caps.size(); ++k) {
        auto [al, ar] = boson_ladder(caps[k]);
        a_lower_full.push_back(SparseOperator::kron(i_sys, embed_mode(al, k, caps)));
        a_raise_full.push_back(SparseOperator::kron(i_sys, embed_mode(ar, k, caps)));
        const SparseOperator x_k = embed_mode(al + ar, k, caps);
        h_eff = h_eff + SparseOperator::kron(q, x_k).scaled(coeffs.zeta[k].real());
    }

    // vec(d rho/dt) = [-i(H (x) I - I (x) H^T)
    //                  + sum_k gamma_k (2 a^- (x) conj(a^+)... )] vec(rho)
    const index_t n = gen.total_dim;
    SparseOperator l = SparseOperator::kron(h_eff, SparseOperator::identity(n)).scaled({0.0, -1.0}) +
                       SparseOperator::kron(SparseOperator::identity(n), h_eff.transpose())
                           .scaled({0.0, 1.0});
    for (std::size_t k = 0; k < caps.size(); ++k) {
        const double g = modes.modes[k].gamma.real();
        const SparseOperator num = a_raise_full[k] * a_lower_full[k];
        l = l + SparseOperator::kron(a_lower_full[k], a_raise_full[k].transpose()).scaled(2.0 * g);
        l = l + SparseOperator::kron(num, SparseOperator::identity(n)).scaled(-g);
        l = l + SparseOperator::kron(SparseOperator::identity(n), num.transpose()).scaled(-g);
    }
    gen.superop = std::move(l);
    return gen;
}

RdtState extract_rdt(const Eigen::MatrixXcd& rho_p, const PseudomodeGenerator& gen,
                     const RdtLayout& target_layout) {
    if (rho_p.rows() != gen.total_dim) throw dimension_mismatch("pseudomode state dim");
    const index_t d = gen.system_dim;
    const index_t dp = gen.total_dim / d;
    RdtState out = RdtState::zero(target_layout);

    const auto kept = target_layout.fock.kept_product_indices();
    for (std::size_t pos = 0; pos < kept.size(); ++pos) {
        const auto cfg = target_layout.fock.config_of(kept[pos]);
        // N[prod_k (a+ + a-)^{n_k}] = prod_k sum_u C(n_k,u) (a+)^u (a-)^{n_k-u}
        SparseOperator op = SparseOperator::identity(1);
        double fact = 1.0;
        for (std::size_t k = 0; k < cfg.size(); ++k) {
            auto [al, ar] = boson_ladder(gen.caps[k]);
            SparseOperator local = SparseOperator::zero(gen.caps[k] + 1);
            for (int u = 0; u <= cfg[k]; ++u) {
                double binom = 1.0;
                for (int i = 0; i < u; ++i) binom = binom * (cfg[k] - i) / (i + 1);
                SparseOperator term = SparseOperator::identity(gen.caps[k] + 1);
                for (int i = 0; i < u; ++i) term = ar * term;
                for (int i = 0; i < cfg[k] - u; ++i) term = term * al;
                local = local + term.scaled(binom);
            }
            op = SparseOperator::kron(op, local);
            for (int q = 2; q <= cfg[k]; ++q) fact *= q;
        }
        // component(s,s') = (prod n_k!)^{-1/2} sum_{p,p'} op(p,p') rho_p[(s,p'),(s',p)]
        Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(d, d);
        for (const auto& e : op.entries())
            for (index_t s = 0; s < d; ++s)
                for (index_t sp = 0; sp < d; ++sp)
                    comp(s, sp) += e.value * rho_p(s * dp + e.col, sp * dp + e.row);
        comp /= std::sqrt(fact);
        for (index_t i = 0; i < d; ++i)
            for (index_t j = 0; j < d; ++j)
                out.data[target_layout.bosonic_index(i, j, pos)] = comp(i, j);
    }
    return out;
}

void propagate_pseudomode(const PseudomodeGenerator& gen, Eigen::MatrixXcd& rho_p, double dt,
                          index_t steps, index_t record_stride,
                          const std::function<void(double, const Eigen::MatrixXcd&)>& record) {
    const index_t n = gen.total_dim;
    // rho_p is column-major in Eigen; the superoperator uses row-major vec,
    // so propagate the transpose layout
    Eigen::MatrixXcd rt = rho_p.transpose();
    Eigen::VectorXcd y = Eigen::Map<Eigen::VectorXcd>(rt.data(), n * n);

    Eigen::VectorXcd k1(n * n), k2(n * n), k3(n * n), k4(n * n), tmp(n * n);
    if (record) record(0.0, rho_p);
    for (index_t s = 1; s <= steps; ++s) {
        gen.superop.apply(y.data(), k1.data());
        tmp = y + (dt / 2.0) * k1;
        gen.superop.apply(tmp.data(), k2.data());
        tmp = y + (dt / 2.0) * k2;
        gen.superop.apply(tmp.data(), k3.data());
        tmp = y + dt * k3;
        gen.superop.apply(tmp.data(), k4.data());
        y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!y.allFinite()) throw non_finite("pseudomode propagation diverged");
        if (record && (s % record_stride == 0 || s == steps)) {
            rt = Eigen::Map<Eigen::MatrixXcd>(y.data(), n, n);
            rho_p = rt.transpose();
            record(s * dt, rho_p);
        }
    }
    rt = Eigen::Map<Eigen::MatrixXcd>(y.data(), n, n);
    rho_p = rt.transpose();
}

} // namespace dqmesq
