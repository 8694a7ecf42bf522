#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dqmesq/models.hpp"
#include "dqmesq/propagate.hpp"
#include "dqmesq/qsim.hpp"

namespace dqmesq {

enum class Method { classical, heom, qsim, pseudomode };

Method method_from_string(const std::string& s);
std::string to_string(Method m);

// One fully resolved simulation job: a model (built-in or inline) plus method
// and numerical parameters. Parsed from the single-document JSON config.
struct JobConfig {
    std::string model = "spin_boson";   // built-in name or "inline"
    std::string regime;
    std::map<std::string, double> overrides;
    std::string inline_json;            // raw JSON of the inline block, if any
    Method method = Method::classical;
    PropagationMethod prop_method = PropagationMethod::rk4;
    std::optional<double> dt;
    std::optional<double> t_final;
    std::optional<index_t> record_stride;
    std::optional<double> epsilon;
    LcuBackend backend = LcuBackend::exact_exponential;
    bool sampled_measurement = false;
    std::uint64_t seed = 0;
    std::vector<std::string> observables;   // empty: model defaults
    std::string units;                       // reference energy unit, informational
    std::string out_dir = ".";

    static JobConfig from_json_text(const std::string& text);
    static JobConfig from_file(const std::string& path);
};

// Resolved job pieces shared by every method.
struct ResolvedJob {
    ModelJob model;
    ObservableSpec observables;
    double dt;
    double t_final;
    index_t record_stride;
    double epsilon;
};

ResolvedJob resolve(const JobConfig& cfg);

struct RunResult {
    Trajectory trajectory;
    std::string manifest_json;
    double wall_time_s = 0.0;
    int qubits_total = 0;     // qsim only
};

RunResult run_job(const JobConfig& cfg);

// Writes <out_dir>/<stem>.csv and <stem>.manifest.json; returns the CSV path.
std::string write_outputs(const RunResult& result, const std::string& out_dir,
                          const std::string& stem);
std::string trajectory_csv(const Trajectory& traj);

struct CompareEntry {
    std::string column;
    double max_abs = 0.0;
    double rms = 0.0;
};
struct CompareReport {
    std::vector<std::string> methods;
    std::vector<CompareEntry> entries;   // versus the first method
    double worst = 0.0;
    bool within(double gate) const { return worst <= gate; }
};

CompareReport compare_methods(const JobConfig& base, const std::vector<std::string>& methods);

struct ScalingPoint {
    double parameter;
    double max_abs_error;
};
struct ScalingReport {
    std::string parameter_name;     // "epsilon" or "dt"
    std::vector<ScalingPoint> points;
    double slope = 0.0;             // fitted log-log slope
};

ScalingReport scaling_study_epsilon(const JobConfig& base, const std::vector<double>& epsilons);
ScalingReport scaling_study_dt(const JobConfig& base, const std::vector<double>& dts);

std::vector<GateRecord> dump_circuit(const JobConfig& cfg);

std::string describe_mode_set(const ModeSet& set);   // JSON mode table

} // namespace dqmesq
