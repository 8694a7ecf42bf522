#include "dqmesq/fock.hpp"

#include <cmath>
#include <numeric>

#include "dqmesq/errors.hpp"

namespace dqmesq {

index_t FockLayout::product_dim() const {
    index_t d = 1;
    for (int cap : caps) d *= (cap + 1);
    return d;
}

bool FockLayout::capped() const {
    if (!tier_cap) return false;
    const int total = std::accumulate(caps.begin(), caps.end(), 0);
    return *tier_cap < total;
}

index_t FockLayout::config_count() const {
    if (!capped()) return product_dim();
    return static_cast<index_t>(kept_product_indices().size());
}

std::vector<index_t> FockLayout::kept_product_indices() const {
    std::vector<index_t> kept;
    const index_t pd = product_dim();
    if (!capped()) {
        kept.resize(pd);
        std::iota(kept.begin(), kept.end(), index_t{0});
        return kept;
    }
    for (index_t idx = 0; idx < pd; ++idx) {
        const auto cfg = config_of(idx);
        if (std::accumulate(cfg.begin(), cfg.end(), 0) <= *tier_cap) kept.push_back(idx);
    }
    return kept;
}

std::vector<int> FockLayout::config_of(index_t product_index) const {
    std::vector<int> cfg(caps.size());
    for (int k = mode_count() - 1; k >= 0; --k) {
        const index_t d = local_dim(k);
        cfg[k] = static_cast<int>(product_index % d);
        product_index /= d;
    }
    return cfg;
}

index_t FockLayout::product_index_of(const std::vector<int>& config) const {
    if (config.size() != caps.size()) throw dimension_mismatch("config length");
    index_t idx = 0;
    for (int k = 0; k < mode_count(); ++k) {
        if (config[k] < 0 || config[k] > caps[k]) throw index_out_of_range("occupation above cap");
        idx = idx * local_dim(k) + config[k];
    }
    return idx;
}

void FockLayout::validate() const {
    for (int cap : caps) {
        if (cap < 1) throw config_error("per-mode cap must be >= 1");
        if (stats == Statistics::fermionic && cap != 1)
            throw config_error("fermionic modes have cap 1");
    }
    if (tier_cap) {
        const int total = std::accumulate(caps.begin(), caps.end(), 0);
        if (*tier_cap < 0 || *tier_cap > total)
            throw config_error("tier cap must lie in [0, sum of caps]");
    }
}

std::pair<SparseOperator, SparseOperator> boson_ladder(int n_max) {
    if (n_max < 1) throw config_error("boson_ladder requires n_max >= 1");
    const index_t d = n_max + 1;
    std::vector<SparseOperator::Entry> lower, raise;
    for (int n = 1; n <= n_max; ++n)
        lower.push_back({n - 1, n, Complex(std::sqrt(double(n)), 0.0)});
    for (int n = 0; n < n_max; ++n)
        raise.push_back({n + 1, n, Complex(std::sqrt(double(n + 1)), 0.0)});
    return {SparseOperator::from_entries(d, std::move(lower)),
            SparseOperator::from_entries(d, std::move(raise))};
}

std::pair<SparseOperator, SparseOperator> jw_ladder_site(int n_sites, int site) {
    if (site < 0 || site >= n_sites) throw index_out_of_range("jw site");
    // sigma^- = |0><1| with parity string Z on all preceding sites
    const SparseOperator z = SparseOperator::from_entries(
        2, {{0, 0, Complex(1.0, 0.0)}, {1, 1, Complex(-1.0, 0.0)}});
    const SparseOperator sm = SparseOperator::from_entries(2, {{0, 1, Complex(1.0, 0.0)}});
    const SparseOperator id2 = SparseOperator::identity(2);
    SparseOperator lower = SparseOperator::identity(1);
    for (int s = 0; s < n_sites; ++s) {
        const SparseOperator& factor = (s < site) ? z : (s == site ? sm : id2);
        lower = SparseOperator::kron(lower, factor);
    }
    return {lower, lower.adjoint()};
}

std::pair<SparseOperator, SparseOperator> jw_ladder(const FockLayout& layout, int site) {
    if (layout.stats != Statistics::fermionic)
        throw config_error("jw_ladder requires a fermionic layout");
    return jw_ladder_site(layout.mode_count(), site);
}

SparseOperator embed_operator(const SparseOperator& op, int site, const FockLayout& layout) {
    if (site < 0 || site >= layout.mode_count()) throw index_out_of_range("embed site");
    if (op.dim() != layout.local_dim(site))
        throw dimension_mismatch("operator dim does not match the site's local dim");
    SparseOperator result = SparseOperator::identity(1);
    for (int s = 0; s < layout.mode_count(); ++s) {
        result = SparseOperator::kron(
            result, s == site ? op : SparseOperator::identity(layout.local_dim(s)));
    }
    if (layout.capped()) result = result.restricted(layout.kept_product_indices());
    return result;
}

SparseOperator lift_system_superop(const SparseOperator& op, Side side, index_t system_dim) {
    if (op.dim() != system_dim) throw dimension_mismatch("lift_system_superop operator dim");
    const SparseOperator id = SparseOperator::identity(system_dim);
    return side == Side::left ? SparseOperator::kron(op, id)
                              : SparseOperator::kron(id, op.transpose());
}

} // namespace dqmesq
