#include "dqmesq/heom.hpp"

#include <cmath>
#include <functional>

#include "dqmesq/errors.hpp"

namespace dqmesq {

index_t Hierarchy::block_count() const {
    if (stats == Statistics::bosonic) return fock.config_count();
    return index_t{1} << (2 * pair_count);
}

Hierarchy Hierarchy::zero_bosonic(index_t system_dim, const FockLayout& fock) {
    Hierarchy h;
    h.stats = Statistics::bosonic;
    h.system_dim = system_dim;
    h.fock = fock;
    h.ados.assign(h.block_count(), Eigen::MatrixXcd::Zero(system_dim, system_dim));
    return h;
}

Hierarchy Hierarchy::zero_fermionic(index_t system_dim, int pair_count) {
    Hierarchy h;
    h.stats = Statistics::fermionic;
    h.system_dim = system_dim;
    h.pair_count = pair_count;
    h.fock = FockLayout{Statistics::fermionic, std::vector<int>(pair_count, 1), std::nullopt};
    h.ados.assign(h.block_count(), Eigen::MatrixXcd::Zero(system_dim, system_dim));
    return h;
}

Hierarchy Hierarchy::from_reduced_density(Statistics stats, const Eigen::MatrixXcd& rho0,
                                          const FockLayout& fock_or_pairs) {
    Hierarchy h = stats == Statistics::bosonic
                      ? zero_bosonic(rho0.rows(), fock_or_pairs)
                      : zero_fermionic(rho0.rows(), fock_or_pairs.mode_count());
    h.ados[0] = rho0;
    return h;
}

SignLedger make_sign_ledger(const std::vector<int>& n, const std::vector<int>& m) {
    SignLedger s;
    s.theta_plus.resize(n.size());
    s.theta_minus.resize(m.size());
    int tp = 0, tm = 0;
    for (std::size_t k = 0; k < n.size(); ++k) {
        tp += n[k];
        tm += m[k];
        s.theta_plus[k] = tp;
        s.theta_minus[k] = tm;
    }
    s.n_total = tp;
    s.m_total = tm;
    return s;
}

namespace {

inline double parity(int exponent) { return (exponent % 2 == 0) ? 1.0 : -1.0; }

// dense left/right application of a sparse system operator
void add_left(Eigen::MatrixXcd& acc, const SparseOperator& a, const Eigen::MatrixXcd& x,
              Complex scale) {
    for (const auto& e : a.entries()) acc.row(e.row) += (scale * e.value) * x.row(e.col);
}

void add_right(Eigen::MatrixXcd& acc, const Eigen::MatrixXcd& x, const SparseOperator& a,
               Complex scale) {
    for (const auto& e : a.entries()) acc.col(e.col) += (scale * e.value) * x.col(e.row);
}

Hierarchy heom_rhs_bosonic(const Hierarchy& h, const SystemSpec& sys,
                           const std::vector<FlatMode>& flat, BosonicHeomForm form) {
    const auto kept = h.fock.kept_product_indices();
    std::vector<index_t> position(h.fock.product_dim(), -1);
    for (std::size_t i = 0; i < kept.size(); ++i) position[kept[i]] = static_cast<index_t>(i);

    Hierarchy out = Hierarchy::zero_bosonic(h.system_dim, h.fock);
    const int K = h.fock.mode_count();
    std::vector<index_t> stride(K);
    {
        index_t s = 1;
        for (int k = K - 1; k >= 0; --k) {
            stride[k] = s;
            s *= h.fock.local_dim(k);
        }
    }

    for (std::size_t pos = 0; pos < kept.size(); ++pos) {
        const index_t pidx = kept[pos];
        const auto cfg = h.fock.config_of(pidx);
        const auto& rho = h.block(pos);
        Eigen::MatrixXcd& d = out.block(pos);

        // -i [H_S, rho_n]
        add_left(d, sys.hamiltonian, rho, Complex(0.0, -1.0));
        add_right(d, rho, sys.hamiltonian, Complex(0.0, 1.0));

        for (int k = 0; k < K; ++k) {
            const auto& fm = flat[k];
            const auto& q = sys.couplings[fm.coupling].op;
            const int nk = cfg[k];
            // damping
            d -= (double(nk) * fm.gamma) * rho;
            // tier up
            if (nk < h.fock.caps[k]) {
                const index_t up = position[pidx + stride[k]];
                if (up >= 0) {
                    const auto& rup = h.block(up);
                    if (form == BosonicHeomForm::unscaled) {
                        add_left(d, q, rup, Complex(0.0, -1.0));
                        add_right(d, rup, q, Complex(0.0, 1.0));
                    } else {
                        const Complex f = Complex(0.0, -1.0) * fm.zeta * std::sqrt(double(nk + 1));
                        add_left(d, q, rup, f);
                        add_right(d, rup, q, -f);
                    }
                }
            }
            // tier down
            if (nk > 0) {
                const index_t down = position[pidx - stride[k]];
                const auto& rdn = h.block(down);
                if (form == BosonicHeomForm::unscaled) {
                    add_left(d, q, rdn, Complex(0.0, -1.0) * double(nk) * fm.eta);
                    add_right(d, rdn, q, Complex(0.0, 1.0) * double(nk) * fm.eta_bar_conj);
                } else {
                    const double rt = std::sqrt(double(nk));
                    add_left(d, q, rdn, Complex(0.0, -1.0) * fm.zeta * rt);
                    add_right(d, rdn, q, Complex(0.0, 1.0) * fm.zeta * rt);
                    add_left(d, q, rdn, fm.xi * rt);
                    add_right(d, rdn, q, fm.xi * rt);
                }
            }
        }
    }
    return out;
}

Hierarchy heom_rhs_fermionic(const Hierarchy& h, const SystemSpec& sys,
                             const std::vector<FlatMode>& flat) {
    const int K = h.pair_count;
    const index_t side = index_t{1} << K;
    Hierarchy out = Hierarchy::zero_fermionic(h.system_dim, K);
    std::vector<SparseOperator> c_plus_cache;
    for (int k = 0; k < K; ++k)
        c_plus_cache.push_back(sys.couplings[flat[k].coupling].op.adjoint());

    auto bit = [&](index_t bits, int k) { return int((bits >> (K - 1 - k)) & 1); };
    auto flip = [&](index_t bits, int k) { return bits ^ (index_t{1} << (K - 1 - k)); };

    for (index_t nb = 0; nb < side; ++nb) {
        for (index_t mb = 0; mb < side; ++mb) {
            const index_t idx = nb * side + mb;
            const auto& rho = h.block(idx);
            Eigen::MatrixXcd& d = out.block(idx);

            std::vector<int> n(K), m(K);
            for (int k = 0; k < K; ++k) { n[k] = bit(nb, k); m[k] = bit(mb, k); }
            const SignLedger sl = make_sign_ledger(n, m);
            const int N = sl.n_total, M = sl.m_total;

            // -(i L_S + gamma_nm) rho
            add_left(d, sys.hamiltonian, rho, Complex(0.0, -1.0));
            add_right(d, rho, sys.hamiltonian, Complex(0.0, 1.0));
            Complex damp(0.0, 0.0);
            for (int k = 0; k < K; ++k)
                damp += double(n[k]) * flat[k].gamma_plus + double(m[k]) * flat[k].gamma_minus;
            d -= damp * rho;

            for (int k = 0; k < K; ++k) {
                const auto& c_minus = sys.couplings[flat[k].coupling].op;
                const SparseOperator& c_plus = c_plus_cache[k];
                const Complex eta_p = flat[k].eta;
                const Complex eta_m = std::conj(flat[k].eta_bar_conj);
                const int tp = sl.theta_plus[k];
                const int tm = sl.theta_minus[k];

                if (n[k] == 0) {   // n tier up
                    const auto& r = h.block(flip(nb, k) * side + mb);
                    add_left(d, c_minus, r, Complex(0.0, -1.0) * parity(M + N - tp));
                    add_right(d, r, c_minus, Complex(0.0, 1.0) * parity(tp));
                }
                if (m[k] == 0) {   // m tier up
                    const auto& r = h.block(nb * side + flip(mb, k));
                    add_left(d, c_plus, r, Complex(0.0, -1.0) * parity(M - tm));
                    add_right(d, r, c_plus, Complex(0.0, 1.0) * parity(N + tm));
                }
                if (n[k] == 1) {   // n tier down
                    const auto& r = h.block(flip(nb, k) * side + mb);
                    add_left(d, c_plus, r, Complex(0.0, -1.0) * parity(M + N - tp) * eta_p);
                    add_right(d, r, c_plus,
                              Complex(0.0, 1.0) * parity(tp - 1) * std::conj(eta_m));
                }
                if (m[k] == 1) {   // m tier down
                    const auto& r = h.block(nb * side + flip(mb, k));
                    add_left(d, c_minus, r, Complex(0.0, -1.0) * parity(M - tm) * eta_m);
                    add_right(d, r, c_minus,
                              Complex(0.0, 1.0) * parity(N - 1 + tm) * std::conj(eta_p));
                }
            }
        }
    }
    return out;
}

} // namespace

Hierarchy heom_rhs(const Hierarchy& h, const SystemSpec& sys,
                   const std::vector<FlatMode>& flat_modes, BosonicHeomForm form) {
    if (h.stats == Statistics::bosonic) return heom_rhs_bosonic(h, sys, flat_modes, form);
    return heom_rhs_fermionic(h, sys, flat_modes);
}

RdtState hierarchy_to_rdt(const Hierarchy& h, const std::vector<FlatMode>& flat_modes,
                          const RdtLayout& layout, BosonicHeomForm form) {
    RdtState state = RdtState::zero(layout);
    const index_t d = layout.system_dim;

    if (h.stats == Statistics::bosonic) {
        const auto kept = h.fock.kept_product_indices();
        for (std::size_t pos = 0; pos < kept.size(); ++pos) {
            const auto cfg = h.fock.config_of(kept[pos]);
            const auto& rho = h.block(pos);
            Complex divisor(1.0, 0.0);
            if (form == BosonicHeomForm::unscaled) {
                for (std::size_t k = 0; k < cfg.size(); ++k) {
                    double fact = 1.0;
                    for (int q = 2; q <= cfg[k]; ++q) fact *= q;
                    if (cfg[k] > 0 && std::abs(flat_modes[k].zeta) == 0.0) {
                        if (rho.cwiseAbs().maxCoeff() > 0.0)
                            throw degenerate_zeta("zeta = 0 with nonzero occupation");
                        divisor = Complex(0.0, 0.0);
                        break;
                    }
                    divisor *= std::pow(flat_modes[k].zeta, cfg[k]) * std::sqrt(fact);
                }
                if (divisor == Complex(0.0, 0.0)) continue;
            }
            for (index_t i = 0; i < d; ++i)
                for (index_t j = 0; j < d; ++j)
                    state.data[layout.bosonic_index(i, j, pos)] = rho(i, j) / divisor;
        }
        return state;
    }

    // fermionic: rho_bar_nm = prod (zeta^-)^{-m_k} (zeta^+)^{-n_k} rho_nm placed at
    // |m><n| with the ordering sign (-1)^{N(N-1)/2} of the reversed bra product.
    const int K = h.pair_count;
    const index_t side = index_t{1} << K;
    for (index_t nb = 0; nb < side; ++nb)
        for (index_t mb = 0; mb < side; ++mb) {
            Complex divisor(1.0, 0.0);
            int n_total = 0;
            for (int k = 0; k < K; ++k) {
                const index_t mask = index_t{1} << (K - 1 - k);
                if (nb & mask) {
                    divisor *= flat_modes[k].zeta_p;
                    ++n_total;
                }
                if (mb & mask) divisor *= flat_modes[k].zeta_m;
            }
            const auto& rho = h.block(nb * side + mb);
            if (std::abs(divisor) == 0.0) {
                if (rho.cwiseAbs().maxCoeff() > 0.0)
                    throw degenerate_zeta("zeta = 0 in fermionic scaling");
                continue;
            }
            const double sign = ((n_total * (n_total - 1) / 2) % 2 == 0) ? 1.0 : -1.0;
            for (index_t mu = 0; mu < d; ++mu)
                for (index_t nu = 0; nu < d; ++nu)
                    state.data[layout.fermionic_block_index(mu, mb, nu, nb)] =
                        sign * rho(mu, nu) / divisor;
        }
    return state;
}

void propagate_hierarchy(Hierarchy& h, const SystemSpec& sys,
                         const std::vector<FlatMode>& flat_modes, double dt, index_t steps,
                         index_t record_stride,
                         const std::function<void(double, const Hierarchy&)>& record,
                         BosonicHeomForm form) {
    auto axpy = [](Hierarchy& y, double a, const Hierarchy& x) {
        for (std::size_t b = 0; b < y.ados.size(); ++b) y.ados[b] += a * x.ados[b];
    };
    auto assign = [](Hierarchy& y, const Hierarchy& x) {
        for (std::size_t b = 0; b < y.ados.size(); ++b) y.ados[b] = x.ados[b];
    };
    Hierarchy k1 = h, k2 = h, k3 = h, k4 = h, tmp = h;   // shape-only copies
    if (record) record(0.0, h);
    for (index_t s = 1; s <= steps; ++s) {
        k1 = heom_rhs(h, sys, flat_modes, form);
        assign(tmp, h);
        axpy(tmp, dt / 2.0, k1);
        k2 = heom_rhs(tmp, sys, flat_modes, form);
        assign(tmp, h);
        axpy(tmp, dt / 2.0, k2);
        k3 = heom_rhs(tmp, sys, flat_modes, form);
        assign(tmp, h);
        axpy(tmp, dt, k3);
        k4 = heom_rhs(tmp, sys, flat_modes, form);
        axpy(h, dt / 6.0, k1);
        axpy(h, dt / 3.0, k2);
        axpy(h, dt / 3.0, k3);
        axpy(h, dt / 6.0, k4);
        if (!h.tier0().allFinite()) throw non_finite("hierarchy propagation diverged");
        if (record && (s % record_stride == 0 || s == steps)) record(s * dt, h);
    }
}

} // namespace dqmesq
