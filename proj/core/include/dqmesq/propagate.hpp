#pragma once

#include <functional>

#include "dqmesq/generator.hpp"
#include "dqmesq/rdt.hpp"

namespace dqmesq {

enum class PropagationMethod { rk4, dense_exponential };

struct PropagationConfig {
    double dt = 0.01;
    double t_final = 10.0;
    PropagationMethod method = PropagationMethod::rk4;
    index_t record_stride = 10;
    // dense propagator gate; above this dimension the dense path refuses
    index_t dense_dim_limit = 4096;

    index_t steps() const;
    void validate() const;
};

using RecordCallback = std::function<void(double, const RdtState&)>;

// Integrates d/dt rho~ = -i Lambda rho~ and fires the callback at t = 0, at
// every record stride, and at the final step. The state is mutated in place.
void propagate(const Generator& gen, RdtState& state, const PropagationConfig& cfg,
               const RecordCallback& record);

// Convenience wrapper recording named observables row by row.
struct Trajectory {
    std::vector<std::string> columns;      // observable names
    std::vector<double> times;
    std::vector<std::vector<double>> rows;
    double max_trace_deviation = 0.0;      // max |tr rho_raw - 1| seen at records
};

Trajectory propagate_recorded(const Generator& gen, RdtState state,
                              const PropagationConfig& cfg, const ObservableSpec& spec);

} // namespace dqmesq
