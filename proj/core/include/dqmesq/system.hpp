#pragma once

#include <string>
#include <vector>

#include "dqmesq/fock.hpp"
#include "dqmesq/sparse.hpp"

namespace dqmesq {

// One system-environment coupling channel, labelled (alpha, u). The operator
// is the Hermitian Q_u for bosonic statistics and the annihilation c_u^- for
// fermionic statistics (JW matrix within the system space).
struct Coupling {
    std::string label;
    SparseOperator op;
};

struct SystemSpec {
    index_t dim = 0;
    SparseOperator hamiltonian;
    std::vector<Coupling> couplings;
    Statistics stats = Statistics::bosonic;

    void validate() const;
};

// Pauli matrices and common builders used by models and tests.
SparseOperator pauli_x();
SparseOperator pauli_y();
SparseOperator pauli_z();

// JW annihilation operator for orbital `orbital` among n_orbitals system
// orbitals (first orbital owns the most significant bit).
SparseOperator orbital_annihilation(int n_orbitals, int orbital);
SparseOperator orbital_number(int n_orbitals, int orbital);

} // namespace dqmesq
