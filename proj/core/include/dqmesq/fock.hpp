#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "dqmesq/sparse.hpp"

namespace dqmesq {

enum class Statistics { bosonic, fermionic };

// Truncated dissipaton configuration space: per-mode occupation caps and an
// optional global tier cap on the total occupation. Mode 0 is the most
// significant digit of the configuration index, matching the Kronecker order
// H_1 (x) H_2 (x) ... used when operators are assembled.
struct FockLayout {
    Statistics stats = Statistics::bosonic;
    std::vector<int> caps;              // per-mode N_max (fermionic: all 1)
    std::optional<int> tier_cap;        // L: keep configurations with sum <= L

    int mode_count() const { return static_cast<int>(caps.size()); }
    index_t local_dim(int mode) const { return caps[mode] + 1; }
    index_t product_dim() const;
    index_t config_count() const;       // product_dim, or #configs under the tier cap
    bool capped() const;                // tier cap active and actually binding

    // Indices (in the product space) of configurations kept under the tier
    // cap, in increasing order.
    std::vector<index_t> kept_product_indices() const;
    std::vector<int> config_of(index_t product_index) const;
    index_t product_index_of(const std::vector<int>& config) const;

    void validate() const;
};

// Truncated bosonic ladder pair on a single level with occupations 0..n_max.
// The raising operator annihilates |n_max> (configurations above the cap are
// dropped, matching hierarchy truncation).
std::pair<SparseOperator, SparseOperator> boson_ladder(int n_max);

// Jordan-Wigner ladder pair (lower, raise) for `site` among n_sites ordered
// fermionic sites; parity string over all preceding sites.
std::pair<SparseOperator, SparseOperator> jw_ladder_site(int n_sites, int site);
std::pair<SparseOperator, SparseOperator> jw_ladder(const FockLayout& layout, int site);

// identity (x) ... (x) op (x) ... (x) identity over the layout's modes, with
// tier-capped configurations removed when a global cap is set.
SparseOperator embed_operator(const SparseOperator& op, int site, const FockLayout& layout);

enum class Side { left, right };

// Lift a system operator to the vectorized system space (row-major vec):
// left -> op (x) I, right -> I (x) op^T, so that
// vec(A rho B) = (A (x) B^T) vec(rho).
SparseOperator lift_system_superop(const SparseOperator& op, Side side, index_t system_dim);

} // namespace dqmesq
