#pragma once

#include <map>
#include <string>

#include "dqmesq/generator.hpp"
#include "dqmesq/modes.hpp"
#include "dqmesq/qsim.hpp"
#include "dqmesq/rdt.hpp"
#include "dqmesq/system.hpp"

namespace dqmesq {

// A fully parameterized ready-to-run job. All energies are dimensionless in
// the model's reference unit (Omega, U, V or Delta); times in inverse units.
struct ModelJob {
    std::string model;
    std::string regime;
    SystemSpec system;
    std::map<std::string, ModeSetWithCoeffs> modesets;
    FockLayout fock;                      // flattened dissipaton layout
    Eigen::MatrixXcd rho0;                // initial reduced density (unit trace)
    std::vector<std::string> observables; // default observable names
    double dt = 0.01;
    double t_final = 10.0;
    index_t record_stride = 10;
    double epsilon = 0.05;
    bool generated_modes = false;
    bool initial_state_assumed = false;   // dimer/diam defaults are inferred
    std::map<std::string, double> parameters;

    Generator build_generator(bool keep_terms = false) const;
    RdtState initial_state(const RdtLayout& layout) const;
};

// name: spin_boson | siam | excitonic_dimer | diam
// regime (spin_boson, siam): low | high temperature; others: "".
ModelJob instantiate_model(const std::string& name, const std::string& regime = "",
                           const std::map<std::string, double>& overrides = {});

// Verbatim tabulated decompositions for spin_boson and siam;
// generated (flagged) Drude/Lorentzian decompositions for the dimer and diam.
ModeSet paper_mode_table(const std::string& name, const std::string& temperature_regime);

} // namespace dqmesq
