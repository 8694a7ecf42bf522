#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "dqmesq/generator.hpp"
#include "dqmesq/modes.hpp"
#include "dqmesq/rdt.hpp"
#include "dqmesq/system.hpp"

namespace dqmesq {

// Auxiliary density operators indexed by occupation multi-indices. Bosonic:
// one index n_k per flattened mode. Fermionic: binary indices (n_k, m_k) per
// flattened (sigma=+, sigma=-) dissipaton pair. rho_S is the all-zero entry.
//
// The oracle deliberately keeps dense d x d blocks and explicit index maps.
struct Hierarchy {
    Statistics stats = Statistics::bosonic;
    index_t system_dim = 0;
    FockLayout fock;                 // bosonic: mode caps (+ optional tier cap)
    int pair_count = 0;              // fermionic: number of (+,-) pairs
    std::vector<Eigen::MatrixXcd> ados;   // one block per multi-index

    // bosonic: multi-index = configuration of fock (same indexing as RdtLayout)
    // fermionic: flat index = n_bits * 2^K + m_bits (n = sigma=+ occupations)
    index_t block_count() const;
    static Hierarchy zero_bosonic(index_t system_dim, const FockLayout& fock);
    static Hierarchy zero_fermionic(index_t system_dim, int pair_count);
    static Hierarchy from_reduced_density(Statistics stats, const Eigen::MatrixXcd& rho0,
                                          const FockLayout& fock_or_pairs);

    Eigen::MatrixXcd& block(index_t idx) { return ados[idx]; }
    const Eigen::MatrixXcd& block(index_t idx) const { return ados[idx]; }
    const Eigen::MatrixXcd& tier0() const { return ados[0]; }
};

enum class BosonicHeomForm { unscaled, scaled };

// Time derivative of the hierarchy. Flattened modes (and for the fermionic
// case their sigma pairs and coupling operators) come from the generator's
// provenance to guarantee both paths see the same ordering.
Hierarchy heom_rhs(const Hierarchy& h, const SystemSpec& sys,
                   const std::vector<FlatMode>& flat_modes,
                   BosonicHeomForm form = BosonicHeomForm::unscaled);

// Exact map from a hierarchy to the reduced density tensor:
// bosonic components rho_n / prod_k (zeta_k^{n_k} sqrt(n_k!)),
// fermionic components scaled by prod (zeta^-)^{-m}(zeta^+)^{-n} and placed
// with the bra-ordering sign of the paired Fock states.
RdtState hierarchy_to_rdt(const Hierarchy& h, const std::vector<FlatMode>& flat_modes,
                          const RdtLayout& layout,
                          BosonicHeomForm form = BosonicHeomForm::unscaled);

// Fermionic theta/M/N bookkeeping for one multi-index (exposed for tests).
struct SignLedger {
    std::vector<int> theta_plus;   // prefix sums of n
    std::vector<int> theta_minus;  // prefix sums of m
    int n_total = 0;               // N
    int m_total = 0;               // M
};
SignLedger make_sign_ledger(const std::vector<int>& n, const std::vector<int>& m);

// RK4 propagation of the hierarchy; callback fires at the record stride.
void propagate_hierarchy(Hierarchy& h, const SystemSpec& sys,
                         const std::vector<FlatMode>& flat_modes, double dt, index_t steps,
                         index_t record_stride,
                         const std::function<void(double, const Hierarchy&)>& record,
                         BosonicHeomForm form = BosonicHeomForm::unscaled);

} // namespace dqmesq
