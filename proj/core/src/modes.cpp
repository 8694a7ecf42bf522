#include "dqmesq/modes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dqmesq/errors.hpp"

namespace dqmesq {

namespace {
constexpr double pi = 3.14159265358979323846;
}

void ModeSet::validate() const {
    if (modes.empty()) throw config_error("empty mode set");
    if (pairing.size() != modes.size()) throw config_error("pairing size mismatch");
    for (index_t k = 0; k < size(); ++k) {
        if (modes[k].gamma.real() <= 0.0)
            throw config_error("mode exponent must have Re(gamma) > 0");
        const index_t kb = pairing[k];
        if (kb < 0 || kb >= size() || pairing[kb] != k)
            throw config_error("pairing is not an involution");
        if (stats == Statistics::bosonic) {
            const double scale = std::max(1.0, std::abs(modes[k].gamma));
            if (std::abs(modes[kb].gamma - std::conj(modes[k].gamma)) > tolerance * scale)
                throw config_error("paired exponents are not conjugate within tolerance");
        } else {
            if (modes[k].sigma * modes[kb].sigma != -1)
                throw unpaired_sigma("fermionic pairing must join sigma=+ with sigma=-");
        }
    }
}

ModeSet pair_conjugates(std::vector<ExpMode> modes, double tol) {
    if (modes.empty()) throw config_error("pair_conjugates: empty mode list");
    for (const auto& m : modes)
        if (m.gamma.real() <= 0.0)
            throw config_error("pair_conjugates: Re(gamma) must be positive");

    const index_t n = static_cast<index_t>(modes.size());
    ModeSet set;
    set.tolerance = tol;
    set.modes = std::move(modes);
    set.pairing.assign(n, -1);

    const bool fermionic = std::any_of(set.modes.begin(), set.modes.end(),
                                       [](const ExpMode& m) { return m.sigma != 0; });
    set.stats = fermionic ? Statistics::fermionic : Statistics::bosonic;

    if (fermionic) {
        // pair the i-th sigma=+ mode with the i-th sigma=- mode
        std::vector<index_t> plus, minus;
        for (index_t k = 0; k < n; ++k) {
            if (set.modes[k].sigma == 1) plus.push_back(k);
            else if (set.modes[k].sigma == -1) minus.push_back(k);
            else throw unpaired_sigma("fermionic mode list contains an untagged mode");
        }
        if (plus.size() != minus.size())
            throw unpaired_sigma("unequal number of sigma=+ and sigma=- modes");
        for (std::size_t i = 0; i < plus.size(); ++i) {
            set.pairing[plus[i]] = minus[i];
            set.pairing[minus[i]] = plus[i];
        }
        return set;
    }

    for (index_t k = 0; k < n; ++k) {
        if (set.pairing[k] >= 0) continue;
        const Complex g = set.modes[k].gamma;
        const double scale = std::max(1.0, std::abs(g));
        if (std::abs(g.imag()) <= tol * scale) {
            set.pairing[k] = k;   // real exponent self-pairs
            continue;
        }
        index_t best = -1, second = -1;
        double best_d = std::numeric_limits<double>::infinity();
        double second_d = best_d;
        for (index_t j = 0; j < n; ++j) {
            if (j == k || set.pairing[j] >= 0) continue;
            const double d = std::abs(set.modes[j].gamma - std::conj(g));
            if (d < best_d) {
                second = best; second_d = best_d;
                best = j; best_d = d;
            } else if (d < second_d) {
                second = j; second_d = d;
            }
        }
        if (best < 0 || best_d > tol * scale)
            throw unpairable_mode("no conjugate partner for exponent with nonzero imaginary part");
        if (second >= 0 && second_d == best_d)
            throw ambiguous_pairing("two partners at exactly equal distance");
        set.pairing[k] = best;
        set.pairing[best] = k;
    }
    set.validate();
    return set;
}

DissipatonCoefficients dissipaton_coefficients(const ModeSet& set, double zeta_floor_rel) {
    set.validate();
    double eta_scale = 0.0;
    for (const auto& m : set.modes) eta_scale = std::max(eta_scale, std::abs(m.eta));
    const double floor = zeta_floor_rel * eta_scale;

    DissipatonCoefficients c;
    c.zeta.resize(set.modes.size());
    c.xi.resize(set.modes.size());
    for (index_t k = 0; k < set.size(); ++k) {
        const Complex eta = set.modes[k].eta;
        const Complex eta_bar = set.modes[set.pairing[k]].eta;
        if (set.stats == Statistics::bosonic) {
            const Complex s = 0.5 * (eta + std::conj(eta_bar));
            const Complex diff = eta - std::conj(eta_bar);
            if (std::abs(s) <= floor) {
                if (std::abs(diff) > floor)
                    throw degenerate_zeta("eta_k + conj(eta_kbar) below floor; xi is ill-defined");
                c.zeta[k] = std::sqrt(s);   // fully decoupled mode
                c.xi[k] = Complex(0.0, 0.0);
            } else {
                c.zeta[k] = std::sqrt(s);   // principal branch
                c.xi[k] = diff / (Complex(0.0, 2.0) * c.zeta[k]);
            }
        } else {
            const Complex p = eta * std::conj(eta_bar);
            if (std::abs(p) <= floor * floor) {
                if (std::abs(eta) > floor)
                    throw degenerate_zeta("eta^sigma * conj(eta^sigmabar) below floor");
                c.zeta[k] = Complex(0.0, 0.0);
                c.xi[k] = Complex(0.0, 0.0);
            } else {
                c.zeta[k] = std::pow(p, 0.25);   // principal branch
                c.xi[k] = eta / c.zeta[k];
            }
        }
    }
    return c;
}

ModeSetWithCoeffs with_coefficients(ModeSet set) {
    auto coeffs = dissipaton_coefficients(set);
    return {std::move(set), std::move(coeffs)};
}

Complex eval_correlation(const ModeSet& set, double t) {
    Complex c(0.0, 0.0);
    for (const auto& m : set.modes) c += m.eta * std::exp(-m.gamma * t);
    return c;
}

Complex eval_correlation_sigma(const ModeSet& set, double t, int sigma) {
    Complex c(0.0, 0.0);
    for (const auto& m : set.modes)
        if (m.sigma == sigma) c += m.eta * std::exp(-m.gamma * t);
    return c;
}

double SpectralDensity::param(const std::string& name) const {
    auto it = params.find(name);
    if (it == params.end()) throw config_error("missing spectral density parameter " + name);
    return it->second;
}

void SpectralDensity::validate() const {
    auto need = [&](std::initializer_list<const char*> names) {
        for (const char* n : names)
            if (param(n) <= 0.0) throw config_error(std::string("parameter ") + n + " must be positive");
    };
    switch (kind) {
        case SpectralKind::brownian: need({"lambda", "omega0", "zeta"}); break;
        case SpectralKind::drude: need({"lambda", "gamma_d"}); break;
        case SpectralKind::lorentzian: need({"Gamma", "W"}); break;
    }
    if (temperature <= 0.0) throw config_error("temperature must be positive");
}

double SpectralDensity::evaluate(double omega) const {
    switch (kind) {
        case SpectralKind::brownian: {
            const double l = param("lambda"), w0 = param("omega0"), z = param("zeta");
            const double num = 2.0 * l * w0 * w0 * z * omega;
            const double d1 = omega * omega - w0 * w0;
            return num / (d1 * d1 + omega * omega * z * z);
        }
        case SpectralKind::drude: {
            const double l = param("lambda"), g = param("gamma_d");
            return 2.0 * l * g * omega / (omega * omega + g * g);
        }
        case SpectralKind::lorentzian: {
            const double G = param("Gamma"), W = param("W");
            return G * W * W / (omega * omega + W * W);
        }
    }
    return 0.0;
}

namespace {

// 1/(1 - exp(-beta z)), analytically continued
Complex bose_weight(Complex z, double beta) {
    return 1.0 / (1.0 - std::exp(-beta * z));
}

// Fermi function 1/(1 + exp(beta z)), analytically continued
Complex fermi(Complex z, double beta) {
    return 1.0 / (1.0 + std::exp(beta * z));
}

std::vector<ExpMode> drude_modes(const SpectralDensity& J, int K) {
    const double l = J.param("lambda"), g = J.param("gamma_d"), beta = J.beta();
    std::vector<ExpMode> modes;
    modes.push_back({Complex(l * g / std::tan(beta * g / 2.0), -l * g), Complex(g, 0.0), 0});
    for (int j = 1; j < K; ++j) {
        const double nu = 2.0 * pi * j / beta;
        if (std::abs(nu - g) < 1e-10 * g)
            throw resonant_matsubara("Matsubara frequency coincides with the Drude rate");
        modes.push_back({Complex(4.0 * l * g * nu / (beta * (nu * nu - g * g)), 0.0),
                         Complex(nu, 0.0), 0});
    }
    return modes;
}

std::vector<ExpMode> brownian_modes(const SpectralDensity& J, int K) {
    const double l = J.param("lambda"), w0 = J.param("omega0"), z = J.param("zeta");
    const double beta = J.beta();
    if (K < 2) throw config_error("brownian decomposition needs K >= 2 (pole pair)");
    // poles of J in the lower half plane: omega = +-Omega' - i zeta/2
    const Complex omega_p = std::sqrt(Complex(w0 * w0 - z * z / 4.0, 0.0));
    const Complex w1 = omega_p - Complex(0.0, 0.5 * z);
    const Complex w2 = -omega_p - Complex(0.0, 0.5 * z);
    const Complex r = l * w0 * w0 / omega_p;
    std::vector<ExpMode> modes;
    modes.push_back({r * bose_weight(w1, beta), Complex(0.0, 1.0) * w1, 0});
    modes.push_back({-r * bose_weight(w2, beta), Complex(0.0, 1.0) * w2, 0});
    for (int j = 1; j + 2 <= K; ++j) {
        const double nu = 2.0 * pi * j / beta;
        const double den = (nu * nu + w0 * w0) * (nu * nu + w0 * w0) - nu * nu * z * z;
        if (std::abs(den) < 1e-10 * w0 * w0 * w0 * w0)
            throw resonant_matsubara("Matsubara frequency resonant with the Brownian pole");
        modes.push_back({Complex(-4.0 * l * w0 * w0 * z * nu / (beta * den), 0.0),
                         Complex(nu, 0.0), 0});
    }
    return modes;
}

// C^sigma(t) = (1/pi) Int J(w) f^sigma(w) e^{sigma i w t} dw with f^+ the
// Fermi function and f^- = 1 - f^+. Closing the contour picks the spectral
// pole at +-iW plus fermionic Matsubara poles at nu_j = (2j-1) pi / beta.
std::vector<ExpMode> lorentzian_modes(const SpectralDensity& J, int K, int sigma) {
    const double G = J.param("Gamma"), W = J.param("W"), beta = J.beta();
    std::vector<ExpMode> modes;
    const Complex iW(0.0, W);
    const Complex pole_eta = (sigma > 0) ? G * W * fermi(iW, beta)
                                         : G * W * (1.0 - fermi(-iW, beta));
    modes.push_back({pole_eta, Complex(W, 0.0), sigma});
    for (int j = 1; j < K; ++j) {
        const double nu = (2.0 * j - 1.0) * pi / beta;
        if (std::abs(nu - W) < 1e-10 * W)
            throw resonant_matsubara("Matsubara frequency coincides with the Lorentzian width");
        modes.push_back({Complex(0.0, -2.0 * G * W * W / (beta * (W * W - nu * nu))),
                         Complex(nu, 0.0), sigma});
    }
    return modes;
}

} // namespace

ModeSet decompose_spectral_density(const SpectralDensity& density, int K, Statistics stats) {
    density.validate();
    if (K < 1) throw config_error("decomposition needs K >= 1");
    if (stats == Statistics::fermionic) {
        if (density.kind != SpectralKind::lorentzian)
            throw config_error("fermionic decomposition supports the Lorentzian density");
        auto plus = lorentzian_modes(density, K, +1);
        auto minus = lorentzian_modes(density, K, -1);
        plus.insert(plus.end(), minus.begin(), minus.end());
        ModeSet set = pair_conjugates(std::move(plus));
        set.generated = true;
        return set;
    }
    std::vector<ExpMode> modes;
    switch (density.kind) {
        case SpectralKind::drude: modes = drude_modes(density, K); break;
        case SpectralKind::brownian: modes = brownian_modes(density, K); break;
        case SpectralKind::lorentzian:
            throw config_error("Lorentzian density is fermionic");
    }
    ModeSet set = pair_conjugates(std::move(modes));
    set.generated = true;
    return set;
}

} // namespace dqmesq
