#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dqmesq/modes.hpp"
#include "dqmesq/rdt.hpp"
#include "dqmesq/system.hpp"

namespace dqmesq {

// One additive term of the generator, kept (optionally) with enough factor
// structure for per-term Trotter exponentiation:
//   bosonic:   lambda_term = sys_part (x) embed(mode_part at mode)
//   fermionic: lambda_term = ket_part (x) (bra_part)^T over the two sides
struct GeneratorTerm {
    std::string name;
    SparseOperator op;             // full-space contribution to Lambda
    // bosonic factors
    SparseOperator sys_part;       // on d^2 (vectorized system)
    int mode = -1;                 // -1: no mode factor
    SparseOperator mode_part;      // on local mode space
    // fermionic factors (on the side space V); empty dim means identity
    SparseOperator ket_part;
    SparseOperator bra_part;
};

// The non-Hermitian dynamical generator: d/dt rho~ = -i Lambda rho~.
struct Generator {
    RdtLayout layout;
    SystemSpec system;
    SparseOperator lambda;
    std::vector<FlatMode> flat_modes;   // provenance of flattened modes
    std::vector<GeneratorTerm> terms;   // populated when keep_terms
};

Generator build_lambda_bosonic(const SystemSpec& sys,
                               const std::map<std::string, ModeSetWithCoeffs>& modesets,
                               const FockLayout& layout, bool keep_terms = false);

// Fermionic generator over paired dissipaton registers (two JW codes, ket
// side then bra side; within a side: system orbitals first, then modes in
// table order). `mode_order` optionally permutes the flattened mode list on
// both sides (used by the sign-audit tests); identity when empty.
Generator build_lambda_fermionic(const SystemSpec& sys,
                                 const std::map<std::string, ModeSetWithCoeffs>& modesets,
                                 bool keep_terms = false,
                                 const std::vector<int>& mode_order = {});

} // namespace dqmesq
