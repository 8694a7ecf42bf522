#include "dqmesq/system.hpp"

#include "dqmesq/errors.hpp"

namespace dqmesq {

void SystemSpec::validate() const {
    if (dim < 1) throw config_error("system dim must be >= 1");
    if (hamiltonian.dim() != dim) throw dimension_mismatch("system Hamiltonian dim");
    if (!hamiltonian.is_hermitian(1e-12))
        throw config_error("system Hamiltonian is not Hermitian to 1e-12");
    for (const auto& c : couplings) {
        if (c.op.dim() != dim) throw dimension_mismatch("coupling operator dim");
        if (stats == Statistics::bosonic && !c.op.is_hermitian(1e-12))
            throw config_error("bosonic coupling operator " + c.label + " is not Hermitian");
    }
}

SparseOperator pauli_x() {
    return SparseOperator::from_entries(2, {{0, 1, {1.0, 0.0}}, {1, 0, {1.0, 0.0}}});
}

SparseOperator pauli_y() {
    return SparseOperator::from_entries(2, {{0, 1, {0.0, -1.0}}, {1, 0, {0.0, 1.0}}});
}

SparseOperator pauli_z() {
    // basis order (|0>, |1>): sigma_z |1> = +|1>
    return SparseOperator::from_entries(2, {{0, 0, {-1.0, 0.0}}, {1, 1, {1.0, 0.0}}});
}

SparseOperator orbital_annihilation(int n_orbitals, int orbital) {
    return jw_ladder_site(n_orbitals, orbital).first;
}

SparseOperator orbital_number(int n_orbitals, int orbital) {
    auto [lower, raise] = jw_ladder_site(n_orbitals, orbital);
    return raise * lower;
}

} // namespace dqmesq
