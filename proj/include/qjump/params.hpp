// params.hpp — cavity parameters, coherent amplitudes and picture changes.

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qjump {

using Complex = std::complex<double>;

enum class DriveMode { LaserDriven, Feedback };
enum class Picture { Interaction, Schrodinger };

// Physical parameters of one run. Rates are in units of an arbitrary
// inverse time; all simulation output is reported in units of 1/kappa.
//
// mode selects which drive term is active: continuous laser driving with
// Rabi frequency omega, or detection-triggered displacement pulses of
// amplitude beta. The inactive parameter is ignored.
struct CavityParams {
    double kappa = 1.0;       // cavity decay rate, > 0
    double omega = 0.0;       // Rabi frequency of the driving laser, >= 0
    double eta = 0.0;         // detector efficiency in [0, 1]
    Complex beta{0.0, 0.0};   // feedback displacement per detected photon
    double omega_cav = 2.0 * M_PI; // cavity frequency, only used for
                                   // Schroedinger-picture presentation
    DriveMode mode = DriveMode::LaserDriven;
};

// Returns one message per violated field; empty means valid.
inline std::vector<std::string> validate(const CavityParams& p) {
    std::vector<std::string> errors;
    if (!(p.kappa > 0.0) || !std::isfinite(p.kappa))
        errors.push_back("kappa: must be positive and finite");
    if (!(p.eta >= 0.0 && p.eta <= 1.0))
        errors.push_back("eta: must lie in [0, 1]");
    if (!(p.omega >= 0.0) || !std::isfinite(p.omega))
        errors.push_back("omega: must be non-negative and finite");
    if (!std::isfinite(p.beta.real()) || !std::isfinite(p.beta.imag()))
        errors.push_back("beta: must be finite");
    if (!std::isfinite(p.omega_cav))
        errors.push_back("omega_cav: must be finite");
    return errors;
}

inline void ensure_valid(const CavityParams& p) {
    const auto errors = validate(p);
    if (errors.empty()) return;
    std::string joined = "invalid cavity parameters:";
    for (const auto& e : errors) joined += " [" + e + "]";
    throw std::invalid_argument(joined);
}

// One complex amplitude plus the picture it lives in. This is the complete
// quantum state of a trajectory: the field stays in a coherent state.
struct CoherentAmplitude {
    Complex value{0.0, 0.0};
    Picture picture = Picture::Interaction;
};

// alpha_S(t) = alpha_I(t) * exp(-i omega_cav t). Magnitudes are equal in
// both pictures; only the phase rotates.
inline CoherentAmplitude to_schrodinger(const CoherentAmplitude& a, double t,
                                        const CavityParams& p) {
    if (a.picture != Picture::Interaction)
        throw std::invalid_argument("to_schrodinger: input must be interaction picture");
    return {a.value * std::exp(Complex(0.0, -p.omega_cav * t)), Picture::Schrodinger};
}

inline CoherentAmplitude to_interaction(const CoherentAmplitude& a, double t,
                                        const CavityParams& p) {
    if (a.picture != Picture::Schrodinger)
        throw std::invalid_argument("to_interaction: input must be Schroedinger picture");
    return {a.value * std::exp(Complex(0.0, p.omega_cav * t)), Picture::Interaction};
}

} // namespace qjump
