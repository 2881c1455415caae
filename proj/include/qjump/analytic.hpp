// analytic.hpp — closed-form solutions used as fast paths and as oracles
// for the stochastic engine.
//
// Interaction picture throughout. The no-jump evolution of a coherent
// amplitude obeys
//     d alpha/dt = -kappa/2 alpha - i Omega/2,
// whose solution, the emission rate kappa |alpha|^2 and the no-emission
// probability exp[-|alpha|^2 (1 - e^{-kappa dt})] are all exact for the
// undriven cavity and drive the samplers in trajectory.hpp.

#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

#include "qjump/params.hpp"

namespace qjump {

// alpha_I(t) = e^{-kappa t/2} alpha_I(0) - (i Omega / kappa)(1 - e^{-kappa t/2})
inline Complex laser_alpha(double t, Complex alpha0, const CavityParams& p) {
    const double decay = std::exp(-0.5 * p.kappa * t);
    return decay * alpha0 - Complex(0.0, p.omega / p.kappa) * (1.0 - decay);
}

// Pure cavity decay: alpha_I(t) = e^{-kappa t/2} alpha_I(0).
inline Complex decay_alpha(double t, Complex alpha0, double kappa) {
    return std::exp(-0.5 * kappa * t) * alpha0;
}

// Emission rate I(t) = kappa |alpha(t)|^2 for the laser-driven cavity.
inline double laser_emission_rate(double t, Complex alpha0, const CavityParams& p) {
    return p.kappa * std::norm(laser_alpha(t, alpha0, p));
}

// Same rate written out in three terms,
//   I(t) = kappa e^{-kappa t} |a0|^2 + (Omega^2/kappa)(1 - e^{-kappa t/2})^2
//          - 2 Omega e^{-kappa t/2} (1 - e^{-kappa t/2}) Im(a0),
// kept as an independent algebraic route; each form tests the other.
inline double laser_emission_rate_expanded(double t, Complex alpha0,
                                           const CavityParams& p) {
    const double half = std::exp(-0.5 * p.kappa * t);
    const double one_m = 1.0 - half;
    return p.kappa * half * half * std::norm(alpha0)
         + (p.omega * p.omega / p.kappa) * one_m * one_m
         - 2.0 * p.omega * half * one_m * alpha0.imag();
}

// Closed-form integral of I(t) over [t0, t1]; used for bin-averaged rates.
// Writing x = e^{-kappa t/2}, I(t) = B + (C - 2B) x + (A + B - C) x^2 with
// A = kappa |a0|^2, B = Omega^2/kappa, C = -2 Omega Im(a0).
inline double integrated_laser_emission(double t0, double t1, Complex alpha0,
                                        const CavityParams& p) {
    const double a = p.kappa * std::norm(alpha0);
    const double b = p.omega * p.omega / p.kappa;
    const double c = -2.0 * p.omega * alpha0.imag();
    const double x0 = std::exp(-0.5 * p.kappa * t0);
    const double x1 = std::exp(-0.5 * p.kappa * t1);
    return b * (t1 - t0)
         + (c - 2.0 * b) * (2.0 / p.kappa) * (x0 - x1)
         + (a + b - c) * (1.0 / p.kappa) * (x0 * x0 - x1 * x1);
}

// P0(dt) = exp[-|alpha|^2 (1 - e^{-kappa dt})], the probability of no
// emission in (t, t+dt). Exact for the undriven cavity at any dt (between
// jumps the amplitude only decays); short-interval approximation when the
// drive is on. dt may be +infinity: the limit is exp(-|alpha|^2).
inline double survival_probability(Complex alpha, double dt, double kappa) {
    if (dt < 0.0) throw std::invalid_argument("survival_probability: dt must be >= 0");
    return std::exp(-std::norm(alpha) * (-std::expm1(-kappa * dt)));
}

// Detected emission with feedback: |alpha> -> |alpha + beta>.
inline Complex feedback_jump_map(Complex alpha, Complex beta) {
    return alpha + beta;
}

// eta |beta|^2 - 1. Positive: the vacuum is a repulsive fixed point of the
// ensemble dynamics near the origin; negative: attractive.
inline double stability_margin(double eta, Complex beta) {
    if (!(eta >= 0.0 && eta <= 1.0))
        throw std::invalid_argument("stability_margin: eta must lie in [0, 1]");
    return eta * std::norm(beta) - 1.0;
}

// Weighted-sample estimate of the ensemble drift
//   dI/dt = -kappa^2 sum_i w_i [1 - eta(|a_i + beta|^2 - |a_i|^2)] |a_i|^2.
// With eta = 0 this reduces to -kappa I with I = kappa sum_i w_i |a_i|^2.
inline double mean_photon_drift(std::span<const Complex> alphas,
                                std::span<const double> weights,
                                const CavityParams& p) {
    if (p.mode != DriveMode::Feedback)
        throw std::invalid_argument("mean_photon_drift: feedback mode only");
    if (alphas.size() != weights.size())
        throw std::invalid_argument("mean_photon_drift: size mismatch");
    double wsum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("mean_photon_drift: negative weight");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-9)
        throw std::invalid_argument("mean_photon_drift: weights must sum to 1");
    double acc = 0.0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        const double n = std::norm(alphas[i]);
        const double gain = std::norm(alphas[i] + p.beta) - n;
        acc += weights[i] * (1.0 - p.eta * gain) * n;
    }
    return -p.kappa * p.kappa * acc;
}

} // namespace qjump
