#include "dqmesq/qsim.hpp"

#include <cmath>
#include <numeric>
#include <unordered_map>
#include <sstream>

#include "dqmesq/errors.hpp"

namespace dqmesq {

namespace {

int qubits_for(index_t dim) {
    int q = 0;
    while ((index_t{1} << q) < dim) ++q;
    return q;
}

} // namespace

RegisterLayout make_register_layout(const RdtLayout& rdt) {
    RegisterLayout layout;
    if (rdt.stats == Statistics::bosonic) {
        layout.regs.push_back({"sys_ket", qubits_for(rdt.system_dim), rdt.system_dim});
        layout.regs.push_back({"sys_bra", qubits_for(rdt.system_dim), rdt.system_dim});
        for (int k = 0; k < rdt.fock.mode_count(); ++k)
            layout.regs.push_back({"mode" + std::to_string(k),
                                   qubits_for(rdt.fock.local_dim(k)), rdt.fock.local_dim(k)});
    } else {
        const int K = rdt.fock.mode_count();
        layout.regs.push_back({"sys_ket", rdt.n_orbitals, rdt.system_dim});
        layout.regs.push_back({"m_modes", K, index_t{1} << K});
        layout.regs.push_back({"sys_bra", rdt.n_orbitals, rdt.system_dim});
        layout.regs.push_back({"n_modes", K, index_t{1} << K});
    }
    layout.data_qubits = 0;
    for (const auto& r : layout.regs) layout.data_qubits += r.qubits;
    layout.total_qubits = layout.data_qubits + 1;
    layout.data_dim = index_t{1} << layout.data_qubits;

    // physical index -> zero-padded binary address, register by register;
    // tier-capped configurations embed as a subspace of the per-mode registers
    layout.scatter.resize(rdt.dim());
    if (rdt.stats == Statistics::bosonic) {
        const auto kept = rdt.fock.kept_product_indices();
        const index_t d = rdt.system_dim;
        const index_t n_cfg = static_cast<index_t>(kept.size());
        for (index_t idx = 0; idx < rdt.dim(); ++idx) {
            const index_t c = idx % n_cfg;
            const index_t j = (idx / n_cfg) % d;
            const index_t i = idx / (n_cfg * d);
            const auto cfg = rdt.fock.config_of(kept[c]);
            index_t addr = i;
            addr = (addr << layout.regs[1].qubits) | j;
            for (int k = 0; k < rdt.fock.mode_count(); ++k)
                addr = (addr << layout.regs[2 + k].qubits) | cfg[k];
            layout.scatter[idx] = addr;
        }
    } else {
        // everything binary already; the flat index is the address
        for (index_t idx = 0; idx < rdt.dim(); ++idx) layout.scatter[idx] = idx;
    }
    return layout;
}

QubitState encode_rdt(const RdtState& state, const RegisterLayout& layout) {
    const double norm = state.data.norm();
    if (norm == 0.0) throw zero_state("cannot encode the zero RDT");
    QubitState psi;
    psi.total_qubits = layout.total_qubits;
    psi.amplitudes = Eigen::VectorXcd::Zero(index_t{2} * layout.data_dim);
    for (index_t idx = 0; idx < state.data.size(); ++idx)
        psi.amplitudes[layout.scatter[idx]] = state.data[idx] / norm;
    psi.z_ledger = norm;
    return psi;
}

RdtState decode_rdt(const QubitState& psi, const RegisterLayout& layout, const RdtLayout& rdt) {
    RdtState state = RdtState::zero(rdt);
    for (index_t idx = 0; idx < state.data.size(); ++idx)
        state.data[idx] = psi.z_ledger * psi.amplitudes[layout.scatter[idx]];
    return state;
}

std::pair<SparseOperator, SparseOperator> split_generator(const SparseOperator& lambda) {
    const SparseOperator dag = lambda.adjoint();
    return {(lambda + dag).scaled(0.5), (lambda - dag).scaled(0.5)};
}

void LcuConfig::validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw config_error("epsilon must lie in (0, 1)");
    if (dt <= 0.0) throw config_error("dt must be positive");
}

BlockedExponential::BlockedExponential(const SparseOperator& h, Complex scale,
                                       index_t max_block) {
    dim_ = h.dim();
    std::vector<index_t> parent(dim_);
    std::iota(parent.begin(), parent.end(), index_t{0});
    auto find = [&](index_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& e : h.entries())
        if (e.row != e.col) parent[find(e.row)] = find(e.col);

    // gather entries and members per connected component (one pass each)
    std::unordered_map<index_t, std::vector<SparseOperator::Entry>> comp_entries;
    for (const auto& e : h.entries()) comp_entries[find(e.row)].push_back(e);

    std::vector<index_t> singles;
    std::vector<Complex> single_phases;
    std::vector<index_t> local_of(dim_, -1);
    for (auto& [root, entries] : comp_entries) {
        std::vector<index_t> members;
        for (const auto& e : entries) {
            members.push_back(e.row);
            members.push_back(e.col);
        }
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        if (members.size() == 1) {
            singles.push_back(members[0]);
            single_phases.push_back(std::exp(scale * entries[0].value));
            continue;
        }
        if (static_cast<index_t>(members.size()) > max_block)
            throw config_error("trotter term has a connected block larger than the gate limit");
        for (std::size_t i = 0; i < members.size(); ++i) local_of[members[i]] = i;
        Eigen::MatrixXcd local = Eigen::MatrixXcd::Zero(members.size(), members.size());
        for (const auto& e : entries) local(local_of[e.row], local_of[e.col]) = e.value;
        for (index_t i : members) local_of[i] = -1;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(local);
        const Eigen::VectorXcd phases = (scale * es.eigenvalues().cast<Complex>().array()).exp();
        exps_.push_back(es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint());
        blocks_.push_back(std::move(members));
    }
    if (!singles.empty()) {
        Eigen::MatrixXcd diag(singles.size(), 1);
        for (std::size_t i = 0; i < singles.size(); ++i) diag(i, 0) = single_phases[i];
        blocks_.push_back(std::move(singles));
        exps_.push_back(diag);   // single-column matrix marks a diagonal block
    }
}

void BlockedExponential::apply_in_place(Eigen::VectorXcd& v) const {
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        const auto& idx = blocks_[b];
        const auto& m = exps_[b];
        if (m.cols() == 1) {   // diagonal block
            for (std::size_t i = 0; i < idx.size(); ++i) v[idx[i]] *= m(i, 0);
            continue;
        }
        Eigen::VectorXcd local(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) local[i] = v[idx[i]];
        local = m * local;
        for (std::size_t i = 0; i < idx.size(); ++i) v[idx[i]] = local[i];
    }
}

LcuEngine::LcuEngine(const Generator& gen, const RegisterLayout& layout, const LcuConfig& cfg)
    : layout_(layout), cfg_(cfg), rng_(cfg.seed) {
    cfg_.validate();
    const SparseOperator padded = gen.lambda.scattered(layout_.data_dim, layout_.scatter);
    auto [lambda0, lambda1] = split_generator(padded);

    if (cfg_.backend == LcuBackend::exact_exponential) {
        u0_ = std::make_unique<HermitianExponential>(
            lambda0, Complex(0.0, -cfg_.dt), cfg_.dense_dim_limit, cfg_.krylov_tol);
        // A = I - i dt Lambda1 is Hermitian; U+- = (+-i) exp(-+ i eps A)
        const SparseOperator a =
            SparseOperator::identity(layout_.data_dim) +
            lambda1.scaled(Complex(0.0, -cfg_.dt));
        u_plus_ = std::make_unique<HermitianExponential>(a, Complex(0.0, -cfg_.epsilon),
                                                         cfg_.dense_dim_limit, cfg_.krylov_tol);
        u_minus_ = std::make_unique<HermitianExponential>(a, Complex(0.0, cfg_.epsilon),
                                                          cfg_.dense_dim_limit, cfg_.krylov_tol);
        return;
    }

    if (gen.terms.empty())
        throw config_error("trotter backend needs a generator built with keep_terms");
    for (const auto& term : gen.terms) {
        const SparseOperator t = term.op.scattered(layout_.data_dim, layout_.scatter);
        auto [h_part, a_part] = split_generator(t);
        // exp(-i dt H_t)
        if (h_part.nnz())
            trotter_u0_.emplace_back(term.name,
                                     BlockedExponential(h_part, Complex(0.0, -cfg_.dt)));
        // exp(-+ eps dt Lambda1_t) = exp(scale * (i Lambda1_t)) with i*antiherm Hermitian
        if (a_part.nnz()) {
            const SparseOperator herm = a_part.scaled(Complex(0.0, 1.0));
            trotter_plus_.emplace_back(term.name,
                                       BlockedExponential(herm, Complex(0.0, cfg_.epsilon * cfg_.dt)));
            trotter_minus_.emplace_back(term.name,
                                        BlockedExponential(herm, Complex(0.0, -cfg_.epsilon * cfg_.dt)));
        }
    }
}

void LcuEngine::apply_u0(Eigen::VectorXcd& half) const {
    if (cfg_.backend == LcuBackend::exact_exponential) {
        u0_->apply_in_place(half);
        return;
    }
    for (const auto& [name, gate] : trotter_u0_) gate.apply_in_place(half);
}

void LcuEngine::apply_u_eps(Eigen::VectorXcd& half, int sign) const {
    if (cfg_.backend == LcuBackend::exact_exponential) {
        (sign > 0 ? u_plus_ : u_minus_)->apply_in_place(half);
        half *= Complex(0.0, sign > 0 ? 1.0 : -1.0);
        return;
    }
    // U+- = (+-i) e^{-+ i eps} prod_t exp(-+ eps dt Lambda1_t)
    const auto& gates = sign > 0 ? trotter_plus_ : trotter_minus_;
    for (const auto& [name, gate] : gates) gate.apply_in_place(half);
    half *= Complex(0.0, sign > 0 ? 1.0 : -1.0) *
            std::exp(Complex(0.0, -sign * cfg_.epsilon));
}

void LcuEngine::step(QubitState& psi) {
    const index_t nd = layout_.data_dim;
    Eigen::VectorXcd pre_step;
    if (cfg_.sampled_measurement) pre_step = psi.amplitudes;

    for (;;) {
        auto h0 = psi.amplitudes.head(nd);
        auto h1 = psi.amplitudes.tail(nd);
        // Hadamard on the ancilla
        {
            const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
            Eigen::VectorXcd s = (h0 + h1) * inv_sqrt2;
            Eigen::VectorXcd d = (h0 - h1) * inv_sqrt2;
            h0 = s;
            h1 = d;
        }
        // U0 on the data registers (both ancilla branches)
        {
            Eigen::VectorXcd b0 = h0;
            apply_u0(b0);
            h0 = b0;
            Eigen::VectorXcd b1 = h1;
            if (b1.norm() > 0.0) apply_u0(b1);
            h1 = b1;
        }
        // 0-controlled U+ and 1-controlled U-
        {
            Eigen::VectorXcd b0 = h0;
            apply_u_eps(b0, +1);
            h0 = b0;
            Eigen::VectorXcd b1 = h1;
            apply_u_eps(b1, -1);
            h1 = b1;
        }
        // RY(-pi/2) on the ancilla: |0> -> (|0> - |1>)/sqrt2, |1> -> (|0> + |1>)/sqrt2
        {
            const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
            Eigen::VectorXcd new0 = (h0 + h1) * inv_sqrt2;
            Eigen::VectorXcd new1 = (h1 - h0) * inv_sqrt2;
            h0 = new0;
            h1 = new1;
        }
        const double p0 = h0.norm();
        if (cfg_.sampled_measurement) {
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            if (unif(rng_) > p0 * p0) {
                ++retries_;
                psi.amplitudes = pre_step;   // retry the step from the saved state
                continue;
            }
        }
        if (p0 < 1e-12) throw vanishing_projection("ancilla-0 amplitude vanished");
        // deterministic projection onto ancilla |0>; all scalars land in Z
        psi.amplitudes.head(nd) = h0 / p0;
        psi.amplitudes.tail(nd).setZero();
        psi.z_ledger *= p0 / cfg_.epsilon;
        return;
    }
}

std::vector<GateRecord> LcuEngine::circuit() const {
    std::vector<GateRecord> gates;
    std::ostringstream eps, dts;
    eps << cfg_.epsilon;
    dts << cfg_.dt;
    gates.push_back({"H", "anc", "[[0.7071,0.7071],[0.7071,-0.7071]]"});
    if (cfg_.backend == LcuBackend::exact_exponential) {
        gates.push_back({"U0", "data[0.." + std::to_string(layout_.data_qubits - 1) + "]",
                         "exp(-i*dt*Lambda0), dt=" + dts.str()});
        gates.push_back({"C0-U+eps", "ctrl=anc(0), data[*]",
                         "i*exp(-i*eps*(I - i*dt*Lambda1)), eps=" + eps.str()});
        gates.push_back({"C1-U-eps", "ctrl=anc(1), data[*]",
                         "-i*exp(+i*eps*(I - i*dt*Lambda1)), eps=" + eps.str()});
    } else {
        for (const auto& [name, gate] : trotter_u0_)
            gates.push_back({"U0-term", "data[*]", "exp(-i*dt*herm(" + name + ")), dt=" + dts.str()});
        gates.push_back({"C0-U+eps phase", "ctrl=anc(0)", "i*exp(-i*eps), eps=" + eps.str()});
        for (const auto& [name, gate] : trotter_plus_)
            gates.push_back({"C0-U+eps term", "ctrl=anc(0), data[*]",
                             "exp(-eps*dt*anti(" + name + "))"});
        gates.push_back({"C1-U-eps phase", "ctrl=anc(1)", "-i*exp(+i*eps), eps=" + eps.str()});
        for (const auto& [name, gate] : trotter_minus_)
            gates.push_back({"C1-U-eps term", "ctrl=anc(1), data[*]",
                             "exp(+eps*dt*anti(" + name + "))"});
    }
    gates.push_back({"RY", "anc", "theta=-pi/2"});
    gates.push_back({"PROJECT", "anc", "onto |0>, renormalize, Z *= p/eps"});
    return gates;
}

void run_lcu(const Generator& gen, const RdtState& rho0, const LcuConfig& lcu,
             double t_final, index_t record_stride,
             const std::function<void(double, const RdtState&)>& record,
             index_t* sampled_retries) {
    const RegisterLayout layout = make_register_layout(gen.layout);
    LcuEngine engine(gen, layout, lcu);
    QubitState psi = encode_rdt(rho0, layout);
    const index_t steps = static_cast<index_t>(std::llround(t_final / lcu.dt));
    if (record) record(0.0, decode_rdt(psi, layout, gen.layout));
    for (index_t s = 1; s <= steps; ++s) {
        engine.step(psi);
        if (record && (s % record_stride == 0 || s == steps))
            record(s * lcu.dt, decode_rdt(psi, layout, gen.layout));
    }
    if (sampled_retries) *sampled_retries = engine.retries();
}

} // namespace dqmesq
