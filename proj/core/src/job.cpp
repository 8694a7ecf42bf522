#include "dqmesq/job.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "dqmesq/errors.hpp"
#include "dqmesq/heom.hpp"
#include "dqmesq/pseudomode.hpp"

namespace dqmesq {

using nlohmann::json;

namespace {

Complex parse_complex(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw config_error("complex numbers are [re, im] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

SparseOperator parse_matrix(const json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw config_error(std::string(what) + ": matrix required");
    const index_t n = static_cast<index_t>(j.size());
    std::vector<SparseOperator::Entry> entries;
    for (index_t r = 0; r < n; ++r) {
        if (static_cast<index_t>(j[r].size()) != n)
            throw config_error(std::string(what) + ": matrix must be square");
        for (index_t c = 0; c < n; ++c) {
            const Complex v = parse_complex(j[r][c]);
            if (v != Complex(0.0, 0.0)) entries.push_back({r, c, v});
        }
    }
    return SparseOperator::from_entries(n, std::move(entries));
}

SpectralKind kind_from_string(const std::string& s) {
    if (s == "brownian") return SpectralKind::brownian;
    if (s == "drude") return SpectralKind::drude;
    if (s == "lorentzian") return SpectralKind::lorentzian;
    throw config_error("unknown spectral density kind: " + s);
}

ModeSet parse_mode_source(const json& j, Statistics stats) {
    int sources = 0;
    for (const char* key : {"entries", "decomposer", "table"})
        if (j.contains(key)) ++sources;
    if (sources != 1)
        throw config_error("exactly one mode source required per coupling "
                           "(entries | decomposer | table)");
    if (j.contains("entries")) {
        std::vector<ExpMode> modes;
        for (const auto& e : j["entries"]) {
            ExpMode m;
            m.eta = Complex(e.at("eta_re").get<double>(), e.value("eta_im", 0.0));
            m.gamma = Complex(e.at("gamma_re").get<double>(), e.value("gamma_im", 0.0));
            if (e.contains("sigma")) {
                const std::string s = e["sigma"].get<std::string>();
                m.sigma = (s == "+") ? +1 : (s == "-") ? -1 : 0;
                if (m.sigma == 0) throw config_error("sigma must be '+' or '-'");
            }
            modes.push_back(m);
        }
        return pair_conjugates(std::move(modes), j.value("tolerance", 1e-10));
    }
    if (j.contains("decomposer")) {
        const auto& d = j["decomposer"];
        SpectralDensity density;
        density.kind = kind_from_string(d.at("kind").get<std::string>());
        for (const auto& [k, v] : d.at("params").items()) density.params[k] = v.get<double>();
        density.temperature = d.at("temperature").get<double>();
        return decompose_spectral_density(density, d.at("K").get<int>(), stats);
    }
    const auto& t = j["table"];
    return paper_mode_table(t.at("model").get<std::string>(),
                            t.value("regime", std::string{}));
}

ModelJob parse_inline_model(const std::string& text) {
    const json j = json::parse(text);
    ModelJob job;
    job.model = "inline";
    const auto& sys = j.at("system");
    const std::string stats = j.value("statistics", "bosonic");
    job.system.stats = stats == "fermionic" ? Statistics::fermionic : Statistics::bosonic;
    job.system.dim = sys.at("dim").get<index_t>();
    job.system.hamiltonian = parse_matrix(sys.at("h"), "system.h");
    for (const auto& c : sys.at("couplings"))
        job.system.couplings.push_back(
            {c.at("label").get<std::string>(), parse_matrix(c.at("op"), "coupling.op")});

    if (!j.contains("modes")) throw config_error("missing field: modes");
    index_t flattened = 0;
    for (const auto& c : job.system.couplings) {
        if (!j["modes"].contains(c.label))
            throw config_error("missing mode set for coupling " + c.label);
        ModeSet set = parse_mode_source(j["modes"][c.label], job.system.stats);
        if (job.system.stats == Statistics::fermionic) {
            index_t pairs = 0;
            for (const auto& m : set.modes)
                if (m.sigma == 1) ++pairs;
            flattened += pairs;
        } else {
            flattened += set.size();
        }
        job.modesets[c.label] = with_coefficients(std::move(set));
    }

    const auto& lay = j.at("layout");
    std::vector<int> caps;
    if (lay.contains("caps")) {
        for (const auto& c : lay["caps"]) caps.push_back(c.get<int>());
    } else if (lay.contains("n_max")) {
        caps.assign(flattened, lay["n_max"].get<int>());
    } else if (job.system.stats == Statistics::fermionic) {
        caps.assign(flattened, 1);
    } else {
        throw config_error("layout needs caps or n_max");
    }
    if (static_cast<index_t>(caps.size()) != flattened)
        throw config_error("layout caps count must match the flattened mode count");
    job.fock.stats = job.system.stats;
    job.fock.caps = caps;
    if (lay.contains("tier_cap") && !lay["tier_cap"].is_null())
        job.fock.tier_cap = lay["tier_cap"].get<int>();

    const auto& init = j.at("initial");
    job.rho0 = parse_matrix(init.at("rho"), "initial.rho").dense();
    if (std::abs(job.rho0.trace() - Complex(1.0, 0.0)) > 1e-10)
        throw config_error("initial reduced density must have unit trace");

    if (j.contains("observables"))
        for (const auto& o : j["observables"]) job.observables.push_back(o.get<std::string>());
    if (job.observables.empty()) job.observables = {"populations"};
    job.dt = j.value("dt", 0.01);
    job.t_final = j.value("t_final", 10.0);
    job.epsilon = j.value("epsilon", 0.05);
    return job;
}

} // namespace

Method method_from_string(const std::string& s) {
    if (s == "classical") return Method::classical;
    if (s == "heom") return Method::heom;
    if (s == "qsim") return Method::qsim;
    if (s == "pseudomode") return Method::pseudomode;
    throw config_error("unknown method: " + s + " (classical | heom | qsim | pseudomode)");
}

std::string to_string(Method m) {
    switch (m) {
        case Method::classical: return "classical";
        case Method::heom: return "heom";
        case Method::qsim: return "qsim";
        case Method::pseudomode: return "pseudomode";
    }
    return "?";
}

JobConfig JobConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("invalid JSON: ") + e.what());
    }
    JobConfig cfg;
    cfg.model = j.value("model", "spin_boson");
    cfg.regime = j.value("regime", std::string{});
    if (j.contains("overrides"))
        for (const auto& [k, v] : j["overrides"].items()) cfg.overrides[k] = v.get<double>();
    if (cfg.model == "inline") {
        if (!j.contains("inline")) throw config_error("model 'inline' needs an inline block");
        cfg.inline_json = j["inline"].dump();
    }
    cfg.method = method_from_string(j.value("method", "classical"));
    if (j.contains("propagation")) {
        const auto& p = j["propagation"];
        if (p.contains("dt")) cfg.dt = p["dt"].get<double>();
        if (p.contains("t_final")) cfg.t_final = p["t_final"].get<double>();
        if (p.contains("record_stride")) cfg.record_stride = p["record_stride"].get<index_t>();
        const std::string m = p.value("method", "rk4");
        if (m == "rk4") cfg.prop_method = PropagationMethod::rk4;
        else if (m == "dense-exponential") cfg.prop_method = PropagationMethod::dense_exponential;
        else throw config_error("propagation.method: rk4 | dense-exponential");
    }
    if (j.contains("lcu")) {
        const auto& l = j["lcu"];
        if (l.contains("epsilon")) cfg.epsilon = l["epsilon"].get<double>();
        const std::string b = l.value("backend", "exact-exponential");
        if (b == "exact-exponential") cfg.backend = LcuBackend::exact_exponential;
        else if (b == "trotter-order-1") cfg.backend = LcuBackend::trotter1;
        else throw config_error("lcu.backend: exact-exponential | trotter-order-1");
        cfg.sampled_measurement = l.value("sampled_measurement", false);
    }
    if (j.contains("observables"))
        for (const auto& o : j["observables"]) cfg.observables.push_back(o.get<std::string>());
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.units = j.value("units", std::string{});
    cfg.out_dir = j.value("out_dir", ".");
    return cfg;
}

JobConfig JobConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_text(text);
}

ResolvedJob resolve(const JobConfig& cfg) {
    ResolvedJob r;
    r.model = cfg.model == "inline" ? parse_inline_model(cfg.inline_json)
                                    : instantiate_model(cfg.model, cfg.regime, cfg.overrides);
    const auto names = cfg.observables.empty() ? r.model.observables : cfg.observables;
    r.observables = parse_observables(names, r.model.system.dim);
    r.dt = cfg.dt.value_or(r.model.dt);
    r.t_final = cfg.t_final.value_or(r.model.t_final);
    r.record_stride = cfg.record_stride.value_or(r.model.record_stride);
    r.epsilon = cfg.epsilon.value_or(r.model.epsilon);
    return r;
}

namespace {

json layout_json(const Generator& gen) {
    json j;
    j["statistics"] = gen.layout.stats == Statistics::bosonic ? "bosonic" : "fermionic";
    j["system_dim"] = gen.layout.system_dim;
    j["modes"] = gen.layout.fock.mode_count();
    j["caps"] = gen.layout.fock.caps;
    if (gen.layout.fock.tier_cap) j["tier_cap"] = *gen.layout.fock.tier_cap;
    j["rdt_dim"] = gen.layout.dim();
    return j;
}

Trajectory run_classical(const ResolvedJob& r, const JobConfig& cfg, const Generator& gen) {
    PropagationConfig pc;
    pc.dt = r.dt;
    pc.t_final = r.t_final;
    pc.method = cfg.prop_method;
    pc.record_stride = r.record_stride;
    return propagate_recorded(gen, r.model.initial_state(gen.layout), pc, r.observables);
}

Trajectory run_heom(const ResolvedJob& r, const Generator& gen) {
    Trajectory traj;
    traj.columns = r.observables.names();
    Hierarchy h =
        Hierarchy::from_reduced_density(r.model.system.stats, r.model.rho0, gen.layout.fock);
    propagate_hierarchy(
        h, r.model.system, gen.flat_modes, r.dt,
        static_cast<index_t>(std::llround(r.t_final / r.dt)), r.record_stride,
        [&](double t, const Hierarchy& hh) {
            const RdtState mapped = hierarchy_to_rdt(hh, gen.flat_modes, gen.layout);
            traj.times.push_back(t);
            traj.rows.push_back(
                evaluate_observables(mapped, r.observables, r.model.system, gen.flat_modes));
            const double dev = std::abs(hh.tier0().trace() - Complex(1.0, 0.0));
            traj.max_trace_deviation = std::max(traj.max_trace_deviation, dev);
        });
    return traj;
}

Trajectory run_qsim(const ResolvedJob& r, const JobConfig& cfg, const Generator& gen) {
    LcuConfig lc;
    lc.epsilon = r.epsilon;
    lc.dt = r.dt;
    lc.backend = cfg.backend;
    lc.sampled_measurement = cfg.sampled_measurement;
    lc.seed = cfg.seed;
    Trajectory traj;
    traj.columns = r.observables.names();
    run_lcu(gen, r.model.initial_state(gen.layout), lc, r.t_final, r.record_stride,
            [&](double t, const RdtState& s) {
                traj.times.push_back(t);
                traj.rows.push_back(
                    evaluate_observables(s, r.observables, r.model.system, gen.flat_modes));
            });
    return traj;
}

Trajectory run_pseudomode(const ResolvedJob& r, const Generator& gen) {
    if (r.model.system.stats != Statistics::bosonic)
        throw incompatible_methods("pseudomode comparison is bosonic only");
    if (r.model.system.couplings.size() != 1)
        throw incompatible_methods("pseudomode comparison needs a single coupling");
    const auto& mswc = r.model.modesets.begin()->second;
    for (const auto& m : mswc.set.modes)
        if (std::abs(m.eta.imag()) > 1e-12 || std::abs(m.gamma.imag()) > 1e-12)
            throw incompatible_methods("pseudomode requires a real-mode table");
    // one extra level absorbs mapping-edge truncation effects
    std::vector<int> caps;
    for (int c : r.model.fock.caps) caps.push_back(c + 1);
    const PseudomodeGenerator pm =
        build_pseudomode_generator(r.model.system, mswc.set, caps);
    Eigen::MatrixXcd rho_p =
        Eigen::MatrixXcd::Zero(pm.total_dim, pm.total_dim);
    const index_t dp = pm.total_dim / r.model.system.dim;
    for (index_t i = 0; i < r.model.system.dim; ++i)
        for (index_t j = 0; j < r.model.system.dim; ++j)
            rho_p(i * dp, j * dp) = r.model.rho0(i, j);

    Trajectory traj;
    traj.columns = r.observables.names();
    propagate_pseudomode(pm, rho_p, r.dt,
                         static_cast<index_t>(std::llround(r.t_final / r.dt)),
                         r.record_stride, [&](double t, const Eigen::MatrixXcd& rp) {
                             const RdtState mapped = extract_rdt(rp, pm, gen.layout);
                             traj.times.push_back(t);
                             traj.rows.push_back(evaluate_observables(
                                 mapped, r.observables, r.model.system, gen.flat_modes));
                         });
    return traj;
}

} // namespace

RunResult run_job(const JobConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    ResolvedJob r = resolve(cfg);
    const bool keep_terms =
        cfg.method == Method::qsim && cfg.backend == LcuBackend::trotter1;
    const Generator gen = r.model.build_generator(keep_terms);

    RunResult result;
    switch (cfg.method) {
        case Method::classical: result.trajectory = run_classical(r, cfg, gen); break;
        case Method::heom: result.trajectory = run_heom(r, gen); break;
        case Method::qsim: result.trajectory = run_qsim(r, cfg, gen); break;
        case Method::pseudomode: result.trajectory = run_pseudomode(r, gen); break;
    }
    const auto t1 = std::chrono::steady_clock::now();
    result.wall_time_s = std::chrono::duration<double>(t1 - t0).count();

    json manifest;
    manifest["model"] = r.model.model;
    if (!r.model.regime.empty()) manifest["regime"] = r.model.regime;
    manifest["parameters"] = r.model.parameters;
    manifest["parameters"]["dt"] = r.dt;
    manifest["parameters"]["t_final"] = r.t_final;
    manifest["layout"] = layout_json(gen);
    manifest["method"] = to_string(cfg.method);
    if (cfg.method == Method::qsim) {
        const RegisterLayout reg = make_register_layout(gen.layout);
        manifest["qubits"] = {{"data", reg.data_qubits},
                              {"ancilla", 1},
                              {"total", reg.total_qubits}};
        manifest["parameters"]["epsilon"] = r.epsilon;
        result.qubits_total = reg.total_qubits;
    }
    if (!cfg.units.empty()) manifest["units"] = cfg.units;
    manifest["seed"] = cfg.seed;
    manifest["wall_time_s"] = result.wall_time_s;
    manifest["versions"] = {{"dqmesq", "0.1.0"}, {"manifest_format", 1}};
    if (r.model.generated_modes) manifest["generated_modes"] = true;
    if (r.model.initial_state_assumed) manifest["initial_state_assumed"] = true;
    result.manifest_json = manifest.dump(2);
    return result;
}

std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t";
    for (const auto& c : traj.columns) out += "," + c;
    out += "\n";
    char buf[64];
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.12e", traj.times[i]);
        out += buf;
        for (double v : traj.rows[i]) {
            std::snprintf(buf, sizeof(buf), ",%.12e", v);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

std::string write_outputs(const RunResult& result, const std::string& out_dir,
                          const std::string& stem) {
    std::filesystem::create_directories(out_dir);
    const std::string csv_path = out_dir + "/" + stem + ".csv";
    {
        std::ofstream csv(csv_path, std::ios::binary);
        csv << trajectory_csv(result.trajectory);
    }
    {
        std::ofstream mf(out_dir + "/" + stem + ".manifest.json", std::ios::binary);
        mf << result.manifest_json << "\n";
    }
    return csv_path;
}

CompareReport compare_methods(const JobConfig& base, const std::vector<std::string>& methods) {
    if (methods.size() < 2) throw config_error("compare needs at least two methods");
    CompareReport report;
    report.methods = methods;
    std::vector<Trajectory> trajs;
    for (const auto& m : methods) {
        JobConfig cfg = base;
        cfg.method = method_from_string(m);
        trajs.push_back(run_job(cfg).trajectory);
    }
    const Trajectory& ref = trajs[0];
    for (std::size_t t = 1; t < trajs.size(); ++t) {
        if (trajs[t].times.size() != ref.times.size())
            throw incompatible_methods("methods recorded different time grids");
        for (std::size_t c = 0; c < ref.columns.size(); ++c) {
            CompareEntry e;
            e.column = methods[t] + ":" + ref.columns[c];
            double sq = 0.0;
            for (std::size_t i = 0; i < ref.times.size(); ++i) {
                const double d = std::abs(trajs[t].rows[i][c] - ref.rows[i][c]);
                e.max_abs = std::max(e.max_abs, d);
                sq += d * d;
            }
            e.rms = std::sqrt(sq / double(ref.times.size()));
            report.worst = std::max(report.worst, e.max_abs);
            report.entries.push_back(e);
        }
    }
    return report;
}

namespace {

double fit_loglog_slope(const std::vector<ScalingPoint>& pts) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(pts.size());
    for (const auto& p : pts) {
        const double x = std::log(p.parameter);
        const double y = std::log(std::max(p.max_abs_error, 1e-300));
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double trajectory_max_diff(const Trajectory& a, const Trajectory& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < std::min(a.times.size(), b.times.size()); ++i)
        for (std::size_t c = 0; c < a.columns.size(); ++c)
            worst = std::max(worst, std::abs(a.rows[i][c] - b.rows[i][c]));
    return worst;
}

void check_sweep(const std::vector<double>& values) {
    if (values.size() < 3) throw config_error("sweep needs at least 3 geometric points");
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        const double r1 = values[i] / values[i - 1];
        const double r2 = values[i + 1] / values[i];
        if (std::abs(r1 - r2) > 1e-6 * std::abs(r1))
            throw config_error("sweep points must be geometrically spaced");
    }
}

} // namespace

ScalingReport scaling_study_epsilon(const JobConfig& base, const std::vector<double>& epsilons) {
    check_sweep(epsilons);
    ScalingReport report;
    report.parameter_name = "epsilon";
    // The unitary-decomposition error is isolated against the epsilon -> 0
    // limit of the same stepping scheme: at fixed dt the trajectory error
    // versus the classical oracle mixes the epsilon^2 component with the
    // (opposite-signed) first-order splitting error, which would mask the
    // quadratic law at any practical step size.
    JobConfig reference = base;
    reference.method = Method::qsim;
    reference.epsilon = *std::min_element(epsilons.begin(), epsilons.end()) / 100.0;
    const Trajectory oracle = run_job(reference).trajectory;
    for (double eps : epsilons) {
        JobConfig cfg = base;
        cfg.method = Method::qsim;
        cfg.epsilon = eps;
        const Trajectory t = run_job(cfg).trajectory;
        report.points.push_back({eps, trajectory_max_diff(oracle, t)});
    }
    report.slope = fit_loglog_slope(report.points);
    return report;
}

ScalingReport scaling_study_dt(const JobConfig& base, const std::vector<double>& dts) {
    check_sweep(dts);
    ScalingReport report;
    report.parameter_name = "dt";
    // record on the common coarse grid
    const double record_dt =
        *std::max_element(dts.begin(), dts.end()) *
        double(base.record_stride.value_or(10));
    for (double dt : dts) {
        JobConfig classical = base;
        classical.method = Method::classical;
        classical.dt = dt;
        classical.record_stride = static_cast<index_t>(std::llround(record_dt / dt));
        const Trajectory oracle = run_job(classical).trajectory;
        JobConfig cfg = classical;
        cfg.method = Method::qsim;
        cfg.dt = dt;
        const Trajectory t = run_job(cfg).trajectory;
        report.points.push_back({dt, trajectory_max_diff(oracle, t)});
    }
    report.slope = fit_loglog_slope(report.points);
    return report;
}

std::vector<GateRecord> dump_circuit(const JobConfig& cfg) {
    ResolvedJob r = resolve(cfg);
    const bool trotter = cfg.backend == LcuBackend::trotter1;
    const Generator gen = r.model.build_generator(trotter);
    const RegisterLayout layout = make_register_layout(gen.layout);
    LcuConfig lc;
    lc.epsilon = r.epsilon;
    lc.dt = r.dt;
    lc.backend = cfg.backend;
    LcuEngine engine(gen, layout, lc);
    return engine.circuit();
}

std::string describe_mode_set(const ModeSet& set) {
    json j;
    j["statistics"] = set.stats == Statistics::bosonic ? "bosonic" : "fermionic";
    j["generated"] = set.generated;
    json arr = json::array();
    for (std::size_t k = 0; k < set.modes.size(); ++k) {
        json m;
        m["eta_re"] = set.modes[k].eta.real();
        m["eta_im"] = set.modes[k].eta.imag();
        m["gamma_re"] = set.modes[k].gamma.real();
        m["gamma_im"] = set.modes[k].gamma.imag();
        if (set.modes[k].sigma != 0) m["sigma"] = set.modes[k].sigma > 0 ? "+" : "-";
        m["pair"] = set.pairing[k];
        arr.push_back(m);
    }
    j["modes"] = arr;
    return j.dump(2);
}

} // namespace dqmesq
