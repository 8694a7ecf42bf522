#include "dqmesq/propagate.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "dqmesq/errors.hpp"

namespace dqmesq {

index_t PropagationConfig::steps() const {
    return static_cast<index_t>(std::llround(t_final / dt));
}

void PropagationConfig::validate() const {
    if (dt <= 0.0) throw config_error("time step must be positive");
    if (t_final < dt) throw config_error("t_final must be at least one step");
    if (record_stride < 1) throw config_error("record stride must be >= 1");
}

namespace {

void check_finite(const RdtState& state) {
    if (!state.data.allFinite())
        throw non_finite("propagation produced NaN/Inf; reduce dt or raise the truncation");
}

void propagate_rk4(const SparseOperator& lambda, RdtState& state, const PropagationConfig& cfg,
                   const RecordCallback& record) {
    const index_t n = state.data.size();
    Eigen::VectorXcd k1(n), k2(n), k3(n), k4(n), tmp(n);
    const Complex minus_i(0.0, -1.0);
    const double dt = cfg.dt;
    const index_t steps = cfg.steps();
    if (record) record(0.0, state);
    for (index_t s = 1; s <= steps; ++s) {
        lambda.apply(state.data.data(), k1.data());
        tmp = state.data + (minus_i * dt / 2.0) * k1;
        lambda.apply(tmp.data(), k2.data());
        tmp = state.data + (minus_i * dt / 2.0) * k2;
        lambda.apply(tmp.data(), k3.data());
        tmp = state.data + (minus_i * dt) * k3;
        lambda.apply(tmp.data(), k4.data());
        state.data += (minus_i * dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        check_finite(state);
        if (record && (s % cfg.record_stride == 0 || s == steps)) record(s * dt, state);
    }
}

void propagate_dense_exp(const SparseOperator& lambda, RdtState& state,
                         const PropagationConfig& cfg, const RecordCallback& record) {
    if (lambda.dim() > cfg.dense_dim_limit)
        throw config_error("dense-exponential path gated to dimension <= " +
                           std::to_string(cfg.dense_dim_limit));
    const Eigen::MatrixXcd u = (Complex(0.0, -1.0) * cfg.dt * lambda.dense()).exp();
    const index_t steps = cfg.steps();
    if (record) record(0.0, state);
    for (index_t s = 1; s <= steps; ++s) {
        state.data = u * state.data;
        check_finite(state);
        if (record && (s % cfg.record_stride == 0 || s == steps)) record(s * cfg.dt, state);
    }
}

} // namespace

void propagate(const Generator& gen, RdtState& state, const PropagationConfig& cfg,
               const RecordCallback& record) {
    cfg.validate();
    if (state.data.size() != gen.lambda.dim()) throw dimension_mismatch("state/generator dims");
    if (cfg.method == PropagationMethod::rk4) {
        propagate_rk4(gen.lambda, state, cfg, record);
    } else {
        propagate_dense_exp(gen.lambda, state, cfg, record);
    }
}

Trajectory propagate_recorded(const Generator& gen, RdtState state,
                              const PropagationConfig& cfg, const ObservableSpec& spec) {
    Trajectory traj;
    traj.columns = spec.names();
    propagate(gen, state, cfg, [&](double t, const RdtState& s) {
        traj.times.push_back(t);
        traj.rows.push_back(evaluate_observables(s, spec, gen.system, gen.flat_modes));
        const double dev = std::abs(reduced_density_raw(s).trace() - Complex(1.0, 0.0));
        traj.max_trace_deviation = std::max(traj.max_trace_deviation, dev);
    });
    return traj;
}

} // namespace dqmesq
