#pragma once

#include <map>
#include <string>
#include <vector>

#include "dqmesq/fock.hpp"
#include "dqmesq/sparse.hpp"

namespace dqmesq {

// One exponential component eta * exp(-gamma t) of a hybridization
// correlation function. For fermionic environments each component carries a
// sign sigma = +/-1 distinguishing C^+ from C^-; bosonic components have
// sigma = 0.
struct ExpMode {
    Complex eta;
    Complex gamma;
    int sigma = 0;
};

// A decomposition with its pairing map. Bosonic: pairing[k] is the conjugate
// partner kbar with gamma_kbar = conj(gamma_k); real-gamma modes self-pair.
// Fermionic: pairing[k] is the sigma-bar partner sharing the same dissipaton
// index.
struct ModeSet {
    Statistics stats = Statistics::bosonic;
    std::vector<ExpMode> modes;
    std::vector<index_t> pairing;
    double tolerance = 1e-10;
    bool generated = false;   // true when produced by a built-in decomposer

    index_t size() const { return static_cast<index_t>(modes.size()); }
    void validate() const;
};

// zeta/xi per mode, aligned with ModeSet::modes.
// Bosonic: zeta_k^2 = (eta_k + conj(eta_kbar))/2, xi_k = (eta_k - conj(eta_kbar))/(2i zeta_k).
// Fermionic: (zeta_k^s)^4 = eta_k^s * conj(eta_k^sbar), xi_k^s = eta_k^s / zeta_k^s.
struct DissipatonCoefficients {
    std::vector<Complex> zeta;
    std::vector<Complex> xi;
};

struct ModeSetWithCoeffs {
    ModeSet set;
    DissipatonCoefficients coeffs;
};

enum class SpectralKind { brownian, drude, lorentzian };

// Parameter names: brownian {"lambda","omega0","zeta"}, drude
// {"lambda","gamma_d"}, lorentzian {"Gamma","W"}. Temperature in energy
// units with k_B = 1.
struct SpectralDensity {
    SpectralKind kind;
    std::map<std::string, double> params;
    double temperature = 1.0;

    double beta() const { return 1.0 / temperature; }
    double param(const std::string& name) const;
    double evaluate(double omega) const;   // J(omega)
    void validate() const;
};

ModeSet pair_conjugates(std::vector<ExpMode> modes, double tol = 1e-10);

DissipatonCoefficients dissipaton_coefficients(const ModeSet& set,
                                               double zeta_floor_rel = 1e-12);

ModeSetWithCoeffs with_coefficients(ModeSet set);

Complex eval_correlation(const ModeSet& set, double t);
// Fermionic branch C^sigma(t): sums only the modes with the given sigma.
Complex eval_correlation_sigma(const ModeSet& set, double t, int sigma);

// Pole + Matsubara decomposition of a standard spectral density into K
// exponential modes (per sigma branch for fermionic statistics).
ModeSet decompose_spectral_density(const SpectralDensity& density, int K, Statistics stats);

} // namespace dqmesq
