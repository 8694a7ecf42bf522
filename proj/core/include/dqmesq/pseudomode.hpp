#pragma once

#include <functional>

#include "dqmesq/modes.hpp"
#include "dqmesq/rdt.hpp"
#include "dqmesq/system.hpp"

namespace dqmesq {

// Lindblad propagation of the pseudomode-dilated density operator
// rho_p over H_S (x) H_D, valid when every eta_k and gamma_k is real. Serves
// as an independent cross-check of the bosonic generator for real mode sets.
struct PseudomodeGenerator {
    index_t system_dim = 0;
    std::vector<int> caps;          // pseudomode occupation caps
    index_t total_dim = 0;          // d * prod(cap+1)
    SparseOperator superop;         // acts on vec(rho_p), dim total_dim^2
};

PseudomodeGenerator build_pseudomode_generator(const SystemSpec& sys, const ModeSet& modes,
                                               const std::vector<int>& caps,
                                               double imag_tol = 1e-12);

// Normal-ordered extraction of the RDT from the pseudomode state:
// component at |n> = (prod n_k!)^{-1/2} tr_D( N[prod (a_k^+ + a_k^-)^{n_k}] rho_p ).
RdtState extract_rdt(const Eigen::MatrixXcd& rho_p, const PseudomodeGenerator& gen,
                     const RdtLayout& target_layout);

// RK4 integration of the vectorized Lindblad equation.
void propagate_pseudomode(const PseudomodeGenerator& gen, Eigen::MatrixXcd& rho_p, double dt,
                          index_t steps, index_t record_stride,
                          const std::function<void(double, const Eigen::MatrixXcd&)>& record);

} // namespace dqmesq
