#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dqmesq/fock.hpp"
#include "dqmesq/sparse.hpp"
#include "dqmesq/system.hpp"

namespace dqmesq {

// Index layout of the reduced density tensor.
//
// Bosonic: flat index = (i*d + j)*C + c over (system ket i, system bra j,
// dissipaton configuration c); C = fock.config_count().
//
// Fermionic: the RDT is a matrix over the combined side space
// V = (system orbitals, dissipaton modes) with its own Jordan-Wigner code per
// side; flat index = a*side_dim + b with a = mu*2^K + m (ket side) and
// b = nu*2^K + n (bra side). Ket-side registers precede bra-side registers.
struct RdtLayout {
    Statistics stats = Statistics::bosonic;
    index_t system_dim = 0;
    int n_orbitals = 0;           // fermionic only: log2(system_dim)
    FockLayout fock;              // flattened dissipaton modes (one side, for fermionic)

    index_t config_count() const { return fock.config_count(); }
    index_t side_dim() const;     // fermionic: system_dim * 2^K
    index_t dim() const;

    index_t bosonic_index(index_t i, index_t j, index_t config) const;
    index_t fermionic_index(index_t a, index_t b) const;
    index_t fermionic_block_index(index_t mu, index_t m, index_t nu, index_t n) const;
    index_t vacuum_config() const { return 0; }
};

struct RdtState {
    RdtLayout layout;
    Eigen::VectorXcd data;

    static RdtState zero(const RdtLayout& layout);
    // rho_S at the dissipaton vacuum, zeros elsewhere.
    static RdtState from_reduced_density(const RdtLayout& layout, const Eigen::MatrixXcd& rho0);
};

// Vacuum-configuration block of the RDT as a d x d matrix, renormalized by
// its trace once at readout. Never mutates the state.
Eigen::MatrixXcd reduced_density(const RdtState& state);
Eigen::MatrixXcd reduced_density_raw(const RdtState& state);   // no renormalization

// Named observables read from an RDT.
struct Observable {
    enum class Kind { population, population_difference, current, current_total };
    std::string name;
    Kind kind;
    index_t i = 0, j = 0;      // population / difference indices
    std::string label;          // coupling label for per-reservoir current
};

struct ObservableSpec {
    std::vector<Observable> items;
    std::vector<std::string> names() const;
};

ObservableSpec parse_observables(const std::vector<std::string>& names, index_t system_dim);

// Mode provenance needed to read currents: for each flattened dissipaton mode,
// the coupling label and operator it belongs to.
struct FlatMode {
    std::string label;      // coupling label (alpha, u)
    index_t coupling;       // index into SystemSpec::couplings
    Complex gamma_minus;    // fermionic: gamma of the sigma=- member
    Complex gamma_plus;     // fermionic: gamma of the sigma=+ member
    Complex gamma;          // bosonic
    Complex eta;                    // bosonic eta_k; fermionic eta^+
    Complex eta_bar_conj;           // bosonic conj(eta_kbar); fermionic conj(eta^-)
    Complex zeta, xi;               // bosonic coefficients
    Complex zeta_p, zeta_m, xi_p, xi_m;   // fermionic coefficients
};

std::vector<double> evaluate_observables(const RdtState& state, const ObservableSpec& spec,
                                         const SystemSpec& sys,
                                         const std::vector<FlatMode>& flat_modes);

} // namespace dqmesq
