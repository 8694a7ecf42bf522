#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "dqmesq/expm.hpp"
#include "dqmesq/generator.hpp"
#include "dqmesq/rdt.hpp"

namespace dqmesq {

// Qubit register layout for the statevector simulation. Registers are listed
// most-significant first in the amplitude index; the control ancilla occupies
// the highest-order bit so the two ancilla branches are the contiguous
// halves of the amplitude vector.
struct RegisterLayout {
    struct Register {
        std::string name;
        int qubits;
        index_t phys_dim;   // physical dimension embedded in this register
    };
    std::vector<Register> regs;    // data registers
    int data_qubits = 0;
    int total_qubits = 0;          // data + 1 ancilla
    index_t data_dim = 0;          // 2^data_qubits
    std::vector<index_t> scatter;  // RDT index -> data address (zero padding)
};

RegisterLayout make_register_layout(const RdtLayout& rdt);

struct QubitState {
    Eigen::VectorXcd amplitudes;   // length 2^(total_qubits), unit norm
    double z_ledger = 1.0;         // accumulated scalar factors
    int total_qubits = 0;
};

QubitState encode_rdt(const RdtState& state, const RegisterLayout& layout);
RdtState decode_rdt(const QubitState& psi, const RegisterLayout& layout, const RdtLayout& rdt);

// Lambda0 = (Lambda + Lambda^dag)/2 (Hermitian),
// Lambda1 = (Lambda - Lambda^dag)/2 (anti-Hermitian).
std::pair<SparseOperator, SparseOperator> split_generator(const SparseOperator& lambda);

enum class LcuBackend { exact_exponential, trotter1 };

struct LcuConfig {
    double epsilon = 0.05;
    double dt = 0.01;
    LcuBackend backend = LcuBackend::exact_exponential;
    bool sampled_measurement = false;
    std::uint64_t seed = 0;
    index_t dense_dim_limit = 4096;
    double krylov_tol = 1e-13;

    void validate() const;
};

struct GateRecord {
    std::string name;
    std::string qubits;
    std::string params;
};

// Exponential of a sparse Hermitian generator applied blockwise over the
// connected components of its sparsity graph; each component is
// exponentiated once (dense) and reused every step.
class BlockedExponential {
public:
    BlockedExponential() = default;
    BlockedExponential(const SparseOperator& h, Complex scale, index_t max_block = 8192);
    void apply_in_place(Eigen::VectorXcd& v) const;

private:
    index_t dim_ = 0;
    std::vector<std::vector<index_t>> blocks_;
    std::vector<Eigen::MatrixXcd> exps_;
};

// One LCU-Trotter time step of the Fig.-style circuit:
// H(anc) -> U0 on data -> 0-controlled U+ -> 1-controlled U- -> RY(-pi/2)(anc)
// -> projection of the ancilla onto |0>.
class LcuEngine {
public:
    LcuEngine(const Generator& gen, const RegisterLayout& layout, const LcuConfig& cfg);

    void step(QubitState& psi);
    std::vector<GateRecord> circuit() const;
    index_t retries() const { return retries_; }
    const RegisterLayout& layout() const { return layout_; }

private:
    void apply_u0(Eigen::VectorXcd& half) const;
    void apply_u_eps(Eigen::VectorXcd& half, int sign) const;   // sign=+1 -> U+, -1 -> U-

    RegisterLayout layout_;
    LcuConfig cfg_;
    // exact backend
    std::unique_ptr<HermitianExponential> u0_;
    std::unique_ptr<HermitianExponential> u_plus_;
    std::unique_ptr<HermitianExponential> u_minus_;
    // trotter backend
    std::vector<std::pair<std::string, BlockedExponential>> trotter_u0_;
    std::vector<std::pair<std::string, BlockedExponential>> trotter_plus_;
    std::vector<std::pair<std::string, BlockedExponential>> trotter_minus_;
    mutable std::mt19937_64 rng_;
    index_t retries_ = 0;
};

// Repeated LCU steps with decoded readout at the record stride. Returns the
// engine's retry count in sampled mode via the optional out-parameter.
void run_lcu(const Generator& gen, const RdtState& rho0, const LcuConfig& lcu,
             double t_final, index_t record_stride,
             const std::function<void(double, const RdtState&)>& record,
             index_t* sampled_retries = nullptr);

} // namespace dqmesq
