#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dqmesq/errors.hpp"
#include "dqmesq/job.hpp"
#include "dqmesq/modes.hpp"

namespace {

using namespace dqmesq;

// flags shared by run/compare/scaling: config file plus overrides
struct CommonArgs {
    std::string config_path;
    std::string model;
    std::string regime;
    std::string method;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON job config file");
    cmd->add_option("--model", args.model,
                    "built-in model: spin_boson | siam | excitonic_dimer | diam");
    cmd->add_option("--regime", args.regime, "temperature regime (low | high)");
    cmd->add_option("--method", args.method, "classical | heom | qsim | pseudomode");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "RNG seed (sampled-measurement mode)")
        ->each([&](const std::string&) { args.seed_set = true; });
}

JobConfig make_config(const CommonArgs& args) {
    JobConfig cfg = args.config_path.empty() ? JobConfig{} : JobConfig::from_file(args.config_path);
    if (!args.model.empty()) cfg.model = args.model;
    if (!args.regime.empty()) cfg.regime = args.regime;
    if (!args.method.empty()) cfg.method = method_from_string(args.method);
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (args.seed_set) cfg.seed = args.seed;
    return cfg;
}

std::string stem_for(const JobConfig& cfg) {
    std::string s = cfg.model;
    if (!cfg.regime.empty()) s += "_" + cfg.regime;
    s += "_" + to_string(cfg.method);
    return s;
}

int cmd_run(const CommonArgs& args) {
    const JobConfig cfg = make_config(args);
    const RunResult result = run_job(cfg);
    const std::string csv = write_outputs(result, cfg.out_dir, stem_for(cfg));
    std::printf("wrote %s (%zu rows, %.3f s)\n", csv.c_str(),
                result.trajectory.times.size(), result.wall_time_s);
    return 0;
}

int cmd_compare(const CommonArgs& args, const std::vector<std::string>& methods, double gate) {
    const JobConfig cfg = make_config(args);
    const CompareReport report = compare_methods(cfg, methods);
    std::printf("reference method: %s\n", methods[0].c_str());
    for (const auto& e : report.entries)
        std::printf("  %-28s max-abs %.3e  rms %.3e\n", e.column.c_str(), e.max_abs, e.rms);
    std::printf("worst max-abs difference: %.3e (gate %.3e)\n", report.worst, gate);
    return report.within(gate) ? 0 : 2;
}

int cmd_scaling(const CommonArgs& args, const std::vector<double>& epsilons,
                const std::vector<double>& dts) {
    const JobConfig cfg = make_config(args);
    if (epsilons.empty() == dts.empty())
        throw config_error("scaling: give exactly one of --epsilons or --dts");
    const ScalingReport report =
        epsilons.empty() ? scaling_study_dt(cfg, dts) : scaling_study_epsilon(cfg, epsilons);
    for (const auto& p : report.points)
        std::printf("  %s=%-10g max-abs error %.6e\n", report.parameter_name.c_str(),
                    p.parameter, p.max_abs_error);
    std::printf("fitted log-log slope: %.3f\n", report.slope);
    return 0;
}

int cmd_decompose(const std::string& kind, const std::vector<double>& params_kv,
                  double temperature, int k_modes, const std::string& stats) {
    SpectralDensity density;
    density.temperature = temperature;
    if (kind == "drude") {
        density.kind = SpectralKind::drude;
        density.params = {{"lambda", params_kv.at(0)}, {"gamma_d", params_kv.at(1)}};
    } else if (kind == "brownian") {
        density.kind = SpectralKind::brownian;
        density.params = {{"lambda", params_kv.at(0)},
                          {"omega0", params_kv.at(1)},
                          {"zeta", params_kv.at(2)}};
    } else if (kind == "lorentzian") {
        density.kind = SpectralKind::lorentzian;
        density.params = {{"Gamma", params_kv.at(0)}, {"W", params_kv.at(1)}};
    } else {
        throw config_error("kind: drude | brownian | lorentzian");
    }
    const ModeSet set = decompose_spectral_density(
        density, k_modes, stats == "fermionic" ? Statistics::fermionic : Statistics::bosonic);
    std::cout << describe_mode_set(set) << "\n";
    return 0;
}

int cmd_dump_circuit(const CommonArgs& args, const std::string& backend) {
    JobConfig cfg = make_config(args);
    if (!backend.empty()) {
        if (backend == "exact-exponential") cfg.backend = LcuBackend::exact_exponential;
        else if (backend == "trotter-order-1") cfg.backend = LcuBackend::trotter1;
        else throw config_error("backend: exact-exponential | trotter-order-1");
    }
    for (const auto& g : dump_circuit(cfg))
        std::printf("%-18s %-28s %s\n", g.name.c_str(), g.qubits.c_str(), g.params.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"DQME-SQ: dissipaton-embedded master equation simulator"};
    app.require_subcommand(1);

    CommonArgs run_args, cmp_args, scale_args, dump_args;
    std::vector<std::string> cmp_methods;
    double cmp_gate = 1e30;
    std::vector<double> epsilons, dts;
    std::string dec_kind = "drude", dec_stats = "bosonic", dump_backend;
    std::vector<double> dec_params;
    double dec_temperature = 1.0;
    int dec_k = 2;

    auto* run = app.add_subcommand("run", "propagate one job and write CSV + manifest");
    add_common(run, run_args);

    auto* cmp = app.add_subcommand("compare", "run several methods on one job and diff them");
    add_common(cmp, cmp_args);
    cmp->add_option("--methods", cmp_methods, "methods to compare (first is the reference)")
        ->required()
        ->delimiter(',');
    cmp->add_option("--gate", cmp_gate, "max-abs gate; exit status 2 if exceeded");

    auto* scale = app.add_subcommand("scaling", "error-scaling study against the classical oracle");
    add_common(scale, scale_args);
    scale->add_option("--epsilons", epsilons, "geometric epsilon sweep")->delimiter(',');
    scale->add_option("--dts", dts, "geometric dt sweep")->delimiter(',');

    auto* dec = app.add_subcommand("decompose", "dump a spectral-density mode table as JSON");
    dec->add_option("--kind", dec_kind, "drude | brownian | lorentzian")->required();
    dec->add_option("--params", dec_params,
                    "drude: lambda,gamma_d | brownian: lambda,omega0,zeta | lorentzian: Gamma,W")
        ->required()
        ->delimiter(',');
    dec->add_option("--temperature", dec_temperature, "temperature (k_B = 1)");
    dec->add_option("-K,--modes", dec_k, "number of exponential modes");
    dec->add_option("--statistics", dec_stats, "bosonic | fermionic");

    auto* dump = app.add_subcommand("dump-circuit", "print the per-step LCU gate list");
    add_common(dump, dump_args);
    dump->add_option("--backend", dump_backend, "exact-exponential | trotter-order-1");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_args);
        if (cmp->parsed()) return cmd_compare(cmp_args, cmp_methods, cmp_gate);
        if (scale->parsed()) return cmd_scaling(scale_args, epsilons, dts);
        if (dec->parsed())
            return cmd_decompose(dec_kind, dec_params, dec_temperature, dec_k, dec_stats);
        if (dump->parsed()) return cmd_dump_circuit(dump_args, dump_backend);
    } catch (const dqmesq::error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
