#include "dqmesq/rdt.hpp"

#include <cmath>

#include "dqmesq/errors.hpp"

namespace dqmesq {

index_t RdtLayout::side_dim() const {
    return system_dim * (index_t{1} << fock.mode_count());
}

index_t RdtLayout::dim() const {
    if (stats == Statistics::bosonic) return system_dim * system_dim * config_count();
    return side_dim() * side_dim();
}

index_t RdtLayout::bosonic_index(index_t i, index_t j, index_t config) const {
    return (i * system_dim + j) * config_count() + config;
}

index_t RdtLayout::fermionic_index(index_t a, index_t b) const {
    return a * side_dim() + b;
}

index_t RdtLayout::fermionic_block_index(index_t mu, index_t m, index_t nu, index_t n) const {
    const index_t modes_dim = index_t{1} << fock.mode_count();
    return fermionic_index(mu * modes_dim + m, nu * modes_dim + n);
}

RdtState RdtState::zero(const RdtLayout& layout) {
    RdtState s;
    s.layout = layout;
    s.data = Eigen::VectorXcd::Zero(layout.dim());
    return s;
}

RdtState RdtState::from_reduced_density(const RdtLayout& layout, const Eigen::MatrixXcd& rho0) {
    if (rho0.rows() != layout.system_dim || rho0.cols() != layout.system_dim)
        throw dimension_mismatch("initial reduced density dim");
    RdtState s = zero(layout);
    const index_t d = layout.system_dim;
    for (index_t i = 0; i < d; ++i)
        for (index_t j = 0; j < d; ++j) {
            const index_t idx = layout.stats == Statistics::bosonic
                                    ? layout.bosonic_index(i, j, 0)
                                    : layout.fermionic_block_index(i, 0, j, 0);
            s.data[idx] = rho0(i, j);
        }
    return s;
}

Eigen::MatrixXcd reduced_density_raw(const RdtState& state) {
    const auto& layout = state.layout;
    const index_t d = layout.system_dim;
    Eigen::MatrixXcd rho(d, d);
    for (index_t i = 0; i < d; ++i)
        for (index_t j = 0; j < d; ++j) {
            const index_t idx = layout.stats == Statistics::bosonic
                                    ? layout.bosonic_index(i, j, 0)
                                    : layout.fermionic_block_index(i, 0, j, 0);
            rho(i, j) = state.data[idx];
        }
    return rho;
}

Eigen::MatrixXcd reduced_density(const RdtState& state) {
    Eigen::MatrixXcd rho = reduced_density_raw(state);
    const Complex tr = rho.trace();
    if (std::abs(tr) < 1e-300) throw zero_trace("vacuum block has zero trace");
    return rho / tr;
}

std::vector<std::string> ObservableSpec::names() const {
    std::vector<std::string> out;
    out.reserve(items.size());
    for (const auto& o : items) out.push_back(o.name);
    return out;
}

ObservableSpec parse_observables(const std::vector<std::string>& names, index_t system_dim) {
    ObservableSpec spec;
    for (const auto& name : names) {
        Observable o;
        o.name = name;
        if (name == "populations") {
            for (index_t i = 0; i < system_dim; ++i) {
                Observable p;
                p.name = "P" + std::to_string(i);
                p.kind = Observable::Kind::population;
                p.i = i;
                spec.items.push_back(p);
            }
            continue;
        }
        if (name.rfind("P", 0) == 0 && name.find("_minus_") != std::string::npos) {
            const auto pos = name.find("_minus_");
            o.kind = Observable::Kind::population_difference;
            o.i = std::stoll(name.substr(1, pos - 1));
            o.j = std::stoll(name.substr(pos + 8));   // skip "_minus_P"
            if (o.i >= system_dim || o.j >= system_dim)
                throw unknown_observable("population index out of range in " + name);
        } else if (name.rfind("P", 0) == 0 && name.size() > 1 &&
                   name.find_first_not_of("0123456789", 1) == std::string::npos) {
            o.kind = Observable::Kind::population;
            o.i = std::stoll(name.substr(1));
            if (o.i >= system_dim) throw unknown_observable("population index out of range in " + name);
        } else if (name == "current") {
            o.kind = Observable::Kind::current_total;
        } else if (name.rfind("current:", 0) == 0) {
            o.kind = Observable::Kind::current;
            o.label = name.substr(8);
        } else {
            throw unknown_observable(name);
        }
        spec.items.push_back(o);
    }
    return spec;
}

namespace {

// I_alpha(t) = i sum_{u,k in alpha} tr_S[ c_u^- <0|rho~|0^+_{uk}> - <0^+_{uk}|rho~|0> c_u^+ ]
// read from the first-occupied configurations of the RDT.
double current_for(const RdtState& state, const SystemSpec& sys,
                   const std::vector<FlatMode>& flat_modes, const std::string& label,
                   bool total) {
    const auto& layout = state.layout;
    if (layout.stats != Statistics::fermionic)
        throw unknown_observable("electric current requires fermionic statistics");
    const index_t d = layout.system_dim;
    Complex acc(0.0, 0.0);
    for (std::size_t k = 0; k < flat_modes.size(); ++k) {
        if (!total && flat_modes[k].label != label) continue;
        const auto& c_minus = sys.couplings[flat_modes[k].coupling].op;
        const auto c_plus = c_minus.adjoint();
        // single occupation of mode k on the n (bra) side / m (ket) side
        const index_t occ = index_t{1} << (layout.fock.mode_count() - 1 - static_cast<int>(k));
        Eigen::MatrixXcd a(d, d), b(d, d);
        for (index_t mu = 0; mu < d; ++mu)
            for (index_t nu = 0; nu < d; ++nu) {
                a(mu, nu) = state.data[layout.fermionic_block_index(mu, 0, nu, occ)];
                b(mu, nu) = state.data[layout.fermionic_block_index(mu, occ, nu, 0)];
            }
        acc += (c_minus.dense() * a).trace() - (b * c_plus.dense()).trace();
    }
    // same readout normalization as reduced_density
    const Complex tr = reduced_density_raw(state).trace();
    if (std::abs(tr) < 1e-300) throw zero_trace("vacuum block has zero trace");
    return (Complex(0.0, 1.0) * acc / tr).real();
}

} // namespace

std::vector<double> evaluate_observables(const RdtState& state, const ObservableSpec& spec,
                                         const SystemSpec& sys,
                                         const std::vector<FlatMode>& flat_modes) {
    const Eigen::MatrixXcd rho = reduced_density(state);
    std::vector<double> out;
    out.reserve(spec.items.size());
    for (const auto& o : spec.items) {
        switch (o.kind) {
            case Observable::Kind::population:
                out.push_back(rho(o.i, o.i).real());
                break;
            case Observable::Kind::population_difference:
                out.push_back((rho(o.i, o.i) - rho(o.j, o.j)).real());
                break;
            case Observable::Kind::current:
                out.push_back(current_for(state, sys, flat_modes, o.label, false));
                break;
            case Observable::Kind::current_total:
                out.push_back(current_for(state, sys, flat_modes, "", true));
                break;
        }
    }
    return out;
}

} // namespace dqmesq
