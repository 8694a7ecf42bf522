#pragma once

#include <stdexcept>
#include <string>

namespace dqmesq {

// Base class for all library errors.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

#define DQMESQ_DEFINE_ERROR(name)                                        \
    class name : public error {                                          \
    public:                                                              \
        explicit name(const std::string& msg) : error(#name ": " + msg) {} \
    }

DQMESQ_DEFINE_ERROR(unpairable_mode);
DQMESQ_DEFINE_ERROR(ambiguous_pairing);
DQMESQ_DEFINE_ERROR(degenerate_zeta);
DQMESQ_DEFINE_ERROR(resonant_matsubara);
DQMESQ_DEFINE_ERROR(dimension_mismatch);
DQMESQ_DEFINE_ERROR(missing_mode_set);
DQMESQ_DEFINE_ERROR(unpaired_sigma);
DQMESQ_DEFINE_ERROR(index_out_of_range);
DQMESQ_DEFINE_ERROR(non_finite);
DQMESQ_DEFINE_ERROR(zero_trace);
DQMESQ_DEFINE_ERROR(unknown_observable);
DQMESQ_DEFINE_ERROR(zero_state);
DQMESQ_DEFINE_ERROR(vanishing_projection);
DQMESQ_DEFINE_ERROR(complex_mode_rejected);
DQMESQ_DEFINE_ERROR(unknown_model);
DQMESQ_DEFINE_ERROR(unknown_parameter);
DQMESQ_DEFINE_ERROR(no_table_available);
DQMESQ_DEFINE_ERROR(config_error);
DQMESQ_DEFINE_ERROR(incompatible_methods);

#undef DQMESQ_DEFINE_ERROR

} // namespace dqmesq
