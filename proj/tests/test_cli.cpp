#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "dqmesq/errors.hpp"
#include "dqmesq/job.hpp"

using namespace dqmesq;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

JobConfig quick_spin_boson(const std::string& method) {
    JobConfig cfg = JobConfig::from_json_text(R"({
        "model": "spin_boson", "regime": "high", "method": ")" + method + R"(",
        "propagation": {"dt": 0.01, "t_final": 1.0, "record_stride": 10}
    })");
    return cfg;
}

} // namespace

TEST_CASE("run writes a CSV with the expected columns") {
    const JobConfig cfg = quick_spin_boson("classical");
    const RunResult result = run_job(cfg);
    const std::string csv = trajectory_csv(result.trajectory);
    CHECK(csv.rfind("t,P1_minus_P0\n", 0) == 0);
    CHECK(result.trajectory.times.size() == 11);
    CHECK(result.trajectory.times.front() == 0.0);
    CHECK(result.trajectory.times.back() == doctest::Approx(1.0));
}

TEST_CASE("CSV time grid is strictly increasing with constant stride") {
    const JobConfig cfg = quick_spin_boson("classical");
    const RunResult result = run_job(cfg);
    const auto& t = result.trajectory.times;
    for (std::size_t i = 1; i < t.size(); ++i) {
        CHECK(t[i] > t[i - 1]);
        if (i >= 2)
            CHECK(std::abs((t[i] - t[i - 1]) - (t[i - 1] - t[i - 2])) < 1e-12);
    }
}

TEST_CASE("runs are bit-reproducible") {
    const JobConfig cfg = quick_spin_boson("classical");
    const std::string a = trajectory_csv(run_job(cfg).trajectory);
    const std::string b = trajectory_csv(run_job(cfg).trajectory);
    CHECK(a == b);

    JobConfig q = quick_spin_boson("qsim");
    q.epsilon = 0.05;
    q.sampled_measurement = true;
    q.seed = 77;
    const std::string qa = trajectory_csv(run_job(q).trajectory);
    const std::string qb = trajectory_csv(run_job(q).trajectory);
    CHECK(qa == qb);
}

TEST_CASE("manifest carries layout, qubits, method and versions") {
    JobConfig cfg = JobConfig::from_json_text(R"({
        "model": "siam", "regime": "low", "method": "qsim",
        "propagation": {"dt": 0.01, "t_final": 0.02, "record_stride": 1}
    })");
    const RunResult result = run_job(cfg);
    CHECK(result.qubits_total == 17);   // 4 system + 12 dissipaton + 1 ancilla
    CHECK(result.manifest_json.find("\"total\": 17") != std::string::npos);
    CHECK(result.manifest_json.find("\"method\": \"qsim\"") != std::string::npos);
    CHECK(result.manifest_json.find("\"dqmesq\"") != std::string::npos);
    CHECK(result.manifest_json.find("wall_time_s") != std::string::npos);
}

TEST_CASE("config errors name the problem") {
    CHECK_THROWS_AS(JobConfig::from_json_text("{ not json"), config_error);
    CHECK_THROWS_AS(JobConfig::from_json_text(R"({"method": "tarot"})"), config_error);
    // inline model without modes for its coupling
    JobConfig cfg = JobConfig::from_json_text(R"({
        "model": "inline", "method": "classical",
        "inline": {
            "statistics": "bosonic",
            "system": {"dim": 2, "h": [[[0,0],[1,0]],[[1,0],[0,0]]],
                       "couplings": [{"label": "bath",
                                      "op": [[[1,0],[0,0]],[[0,0],[-1,0]]]}]},
            "modes": {},
            "layout": {"n_max": 2},
            "initial": {"rho": [[[1,0],[0,0]],[[0,0],[0,0]]]}
        }
    })");
    CHECK_THROWS_WITH_AS(run_job(cfg),
                         "config_error: missing mode set for coupling bath", config_error);
}

TEST_CASE("inline models accept tables, entries and decomposers") {
    JobConfig cfg = JobConfig::from_json_text(R"({
        "model": "inline", "method": "classical",
        "propagation": {"dt": 0.01, "t_final": 0.5, "record_stride": 10},
        "inline": {
            "statistics": "bosonic",
            "system": {"dim": 2, "h": [[[1,0],[0.4,0]],[[0.4,0],[-1,0]]],
                       "couplings": [{"label": "bath",
                                      "op": [[[1,0],[0,0]],[[0,0],[-1,0]]]}]},
            "modes": {"bath": {"decomposer": {"kind": "drude", "K": 2,
                                              "params": {"lambda": 0.2, "gamma_d": 2.0},
                                              "temperature": 1.0}}},
            "layout": {"n_max": 2, "tier_cap": 3},
            "observables": ["P0", "P1"],
            "initial": {"rho": [[[0,0],[0,0]],[[0,0],[1,0]]]}
        }
    })");
    const RunResult result = run_job(cfg);
    CHECK(result.trajectory.columns == std::vector<std::string>{"P0", "P1"});
    // populations stay a partition of unity
    for (const auto& row : result.trajectory.rows)
        CHECK(row[0] + row[1] == doctest::Approx(1.0).epsilon(1e-9));

    // exactly one mode source per coupling
    JobConfig two = cfg;
    two.inline_json = std::string(R"({
            "statistics": "bosonic",
            "system": {"dim": 2, "h": [[[1,0],[0.4,0]],[[0.4,0],[-1,0]]],
                       "couplings": [{"label": "bath",
                                      "op": [[[1,0],[0,0]],[[0,0],[-1,0]]]}]},
            "modes": {"bath": {"entries": [{"eta_re": 1.0, "gamma_re": 1.0}],
                               "decomposer": {"kind": "drude", "K": 2,
                                              "params": {"lambda": 0.2, "gamma_d": 2.0},
                                              "temperature": 1.0}}},
            "layout": {"n_max": 2},
            "initial": {"rho": [[[1,0],[0,0]],[[0,0],[0,0]]]}
        })");
    CHECK_THROWS_AS(run_job(two), config_error);
}

TEST_CASE("compare reports per-observable differences and honors gates") {
    JobConfig cfg = quick_spin_boson("classical");
    const CompareReport report = compare_methods(cfg, {"classical", "heom"});
    REQUIRE(report.entries.size() == 1);
    CHECK(report.entries[0].column == "heom:P1_minus_P0");
    CHECK(report.worst < 1e-8);
    CHECK(report.within(1e-8));
    CHECK_THROWS_AS(compare_methods(cfg, {"classical"}), config_error);
}

TEST_CASE("pseudomode compare rejects complex mode tables") {
    JobConfig cfg = quick_spin_boson("pseudomode");
    CHECK_THROWS_AS(run_job(cfg), incompatible_methods);
}

TEST_CASE("scaling study validates sweeps and fits slopes") {
    JobConfig cfg = quick_spin_boson("qsim");
    CHECK_THROWS_AS(scaling_study_epsilon(cfg, {0.1, 0.05}), config_error);
    CHECK_THROWS_AS(scaling_study_epsilon(cfg, {0.1, 0.05, 0.02}), config_error);

    cfg.t_final = 2.0;
    const ScalingReport report = scaling_study_epsilon(cfg, {0.1, 0.05, 0.025});
    CHECK(report.slope > 1.8);
    CHECK(report.slope < 2.2);
}

TEST_CASE("dump-circuit lists gates for both backends") {
    JobConfig cfg = quick_spin_boson("qsim");
    const auto exact = dump_circuit(cfg);
    CHECK(exact.size() == 6);
    cfg.backend = LcuBackend::trotter1;
    const auto trotter = dump_circuit(cfg);
    CHECK(trotter.size() > exact.size());
}

TEST_CASE("the built binary runs end to end") {
    const std::string exe = DQMESQ_CLI_PATH;
    const std::string out =
        (std::filesystem::temp_directory_path() / "dqmesq_cli_test").string();
    std::filesystem::remove_all(out);
    const std::string good = exe +
        " run --model spin_boson --regime high --method classical --out " + out +
        " > /dev/null 2>&1";
    CHECK(std::system(good.c_str()) == 0);
    CHECK(std::filesystem::exists(out + "/spin_boson_high_classical.csv"));
    CHECK(std::filesystem::exists(out + "/spin_boson_high_classical.manifest.json"));
    const std::string csv = slurp(out + "/spin_boson_high_classical.csv");
    CHECK(csv.rfind("t,P1_minus_P0\n", 0) == 0);

    const std::string decompose = exe +
        " decompose --kind drude --params 0.5,5.0 --temperature 1.0 -K 3 > " + out +
        "/modes.json 2>&1";
    CHECK(std::system(decompose.c_str()) == 0);
    CHECK(slurp(out + "/modes.json").find("\"gamma_re\": 5.0") != std::string::npos);

    const std::string dump = exe + " dump-circuit --model spin_boson --regime high > " +
        out + "/gates.txt 2>&1";
    CHECK(std::system(dump.c_str()) == 0);
    CHECK(slurp(out + "/gates.txt").find("RY") != std::string::npos);

    // missing modes in a config file is a loud, named failure
    const std::string bad_cfg = out + "/bad.json";
    std::ofstream(bad_cfg) << R"({"model": "inline", "method": "classical",
        "inline": {"statistics": "bosonic",
                   "system": {"dim": 2, "h": [[[0,0],[1,0]],[[1,0],[0,0]]],
                              "couplings": [{"label": "bath",
                                             "op": [[[1,0],[0,0]],[[0,0],[-1,0]]]}]},
                   "modes": {},
                   "layout": {"n_max": 2},
                   "initial": {"rho": [[[1,0],[0,0]],[[0,0],[0,0]]]}}})";
    const std::string bad = exe + " run --config " + bad_cfg + " --out " + out +
        " > /dev/null 2> " + out + "/err.txt";
    CHECK(std::system(bad.c_str()) != 0);
    CHECK(slurp(out + "/err.txt").find("missing mode set for coupling bath") !=
          std::string::npos);
}
