// trajectory.hpp — the quantum-jump engine.
//
// A trajectory is a stochastic process on one complex amplitude alpha:
// deterministic no-jump segments (pure decay, or the driven closed form)
// interrupted by instantaneous emission events. Two samplers generate the
// event times:
//
//   FixedStep    — per-step sampling with the exact no-emission
//                  probability (feedback) or the midpoint-rate Poisson
//                  count (laser, where jumps cannot change the state).
//                  Consumes exactly two uniform draws per step regardless
//                  of outcome, so runs with coupled seeds stay aligned
//                  draw for draw; the only exception is one extra
//                  detection draw per additional same-step laser emission
//                  (probability O(step hazard squared)).
//   WaitingTime  — exact inversion of the no-emission probability;
//                  feedback (undriven) mode only, where the inversion is
//                  exact at any horizon. Consumes one draw per waiting
//                  decision plus one detection draw per emission.
//
// Divergence policy: once |alpha|^2 exceeds the configured cap the
// trajectory is halted, the amplitude is rescaled onto the cap circle and
// all later samples are frozen at that value; consumers can see which grid
// indices are affected through frozen_from.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qjump/analytic.hpp"
#include "qjump/params.hpp"
#include "qjump/rng.hpp"

namespace qjump {

enum class Sampler { FixedStep, WaitingTime };
enum class TerminalStatus { Completed, HaltedDiverged, HaltedVacuum };
enum class Classification { Vacuum, Diverging, Undecided };

inline constexpr std::size_t kNoFrozenIndex = std::numeric_limits<std::size_t>::max();

struct TrajectoryEvent {
    double time = 0.0;             // emission time (step offset for step_fixed)
    bool detected = false;         // Bernoulli(eta) outcome
    bool feedback_applied = false; // true iff detected and mode == Feedback
};

struct StepResult {
    Complex alpha;
    std::optional<TrajectoryEvent> event; // event.time is relative to step start
    int extra_emissions = 0; // same-step emissions beyond the first (laser mode)
};

struct Trajectory {
    std::uint64_t base_seed = 0;
    std::uint64_t stream_index = 0;
    std::vector<double> times;
    std::vector<Complex> alphas;
    std::vector<TrajectoryEvent> events;
    TerminalStatus terminal_status = TerminalStatus::Completed;
    double halt_time = 0.0;                    // divergence halt time, else horizon
    std::size_t frozen_from = kNoFrozenIndex;  // first grid index frozen at the cap
};

struct SimulateOptions {
    Sampler sampler = Sampler::WaitingTime;
    double dt = 1e-3;              // fixed-step size (same time units as kappa^-1)
    double divergence_cap = 1e4;   // halt when |alpha|^2 exceeds this
    double max_step_hazard = 0.05; // enforce kappa*dt*max(1,|alpha|^2) <= this
};

// One fixed step: apply the no-jump map over dt and draw the emission and
// detection uniforms (both always consumed). In laser mode a jump never
// changes alpha; in feedback mode a detected jump displaces it by beta.
inline StepResult step_fixed(Complex alpha, double dt, const CavityParams& p,
                             RandomStream& rng, double max_step_hazard = 0.05) {
    const double n = std::norm(alpha);
    if (p.kappa * dt * std::max(1.0, n) > max_step_hazard * (1.0 + 1e-12))
        throw std::invalid_argument(
            "step_fixed: kappa*dt*max(1,|alpha|^2) exceeds " +
            std::to_string(max_step_hazard) + " at |alpha|^2 = " + std::to_string(n) +
            "; reduce dt");
    const double u_emit = rng.next_uniform();
    const double u_detect = rng.next_uniform();

    if (p.mode == DriveMode::LaserDriven) {
        // Jumps never change a coherent state here, so emissions form an
        // inhomogeneous Poisson process with rate kappa |alpha(t)|^2. The
        // per-step count is drawn exactly by CDF inversion of Poisson(lam)
        // from the single emission uniform; count >= 1 still happens with
        // probability 1 - e^{-lam}, so first-emission statistics match the
        // plain Bernoulli construction, while bin counts stay unbiased.
        const Complex mid = laser_alpha(0.5 * dt, alpha, p);
        const double lam = p.kappa * std::norm(mid) * dt;
        StepResult out{laser_alpha(dt, alpha, p), std::nullopt, 0};
        double pk = std::exp(-lam);
        double cdf = pk;
        int count = 0;
        while (u_emit > cdf && count < 64) {
            ++count;
            pk *= lam / count;
            cdf += pk;
        }
        if (count > 0) {
            out.event = TrajectoryEvent{0.5 * dt, u_detect <= p.eta, false};
            out.extra_emissions = count - 1;
        }
        return out;
    }

    const double p0 = survival_probability(alpha, dt, p.kappa);
    StepResult out{decay_alpha(dt, alpha, p.kappa), std::nullopt, 0};
    if (u_emit > p0) {
        const bool detected = u_detect <= p.eta;
        if (detected) out.alpha = feedback_jump_map(out.alpha, p.beta);
        out.event = TrajectoryEvent{0.5 * dt, detected, detected};
    }
    return out;
}

// Inverts u = exp[-|alpha|^2 (1 - e^{-kappa t})]. nullopt: the trajectory
// never emits again (u <= e^{-|alpha|^2}) and decays to vacuum.
inline std::optional<double> waiting_time_from_uniform(double u, double n, double kappa) {
    if (n <= 0.0) return std::nullopt;
    if (u <= std::exp(-n)) return std::nullopt;
    return -std::log1p(std::log(u) / n) / kappa;
}

inline std::optional<double> sample_waiting_time(Complex alpha, const CavityParams& p,
                                                 RandomStream& rng) {
    if (p.mode != DriveMode::Feedback)
        throw std::invalid_argument("sample_waiting_time: feedback (undriven) mode only");
    return waiting_time_from_uniform(rng.next_uniform(), std::norm(alpha), p.kappa);
}

namespace detail {

// Sink concept:
//   on_sample(grid_index, alpha)          state at grid time (post-jump when
//                                         a jump lands exactly on the point)
//   on_event(t, detected, applied)        emission event
//   on_frozen(grid_index)                 first frozen grid index
template <class Sink>
struct EvolveOutcome {
    TerminalStatus status = TerminalStatus::Completed;
    double halt_time = 0.0;
};

// The smooth segment between state-changing jumps is evaluated in closed
// form from one anchor (t0, alpha0), never incrementally; the anchor moves
// only when a jump actually changes the amplitude. Paths on which no jump
// acts (laser mode, eta = 0, or beta = 0) therefore sample the exact
// closed-form solution bit for bit, independent of where emissions landed.
template <class Sink>
TerminalStatus evolve_trajectory(Complex alpha0, double horizon, const CavityParams& p,
                                 RandomStream& rng, std::span<const double> grid,
                                 const SimulateOptions& opt, Sink&& sink,
                                 double* halt_time_out = nullptr) {
    const double kappa = p.kappa;
    const bool laser = p.mode == DriveMode::LaserDriven;
    const std::size_t n_grid = grid.size();

    Complex anchor_alpha = alpha0;
    double anchor_t = 0.0;
    double t = 0.0;
    std::size_t gi = 0;
    TerminalStatus status = TerminalStatus::Completed;
    double halt_time = horizon;

    auto alpha_at = [&](double time) {
        return laser ? laser_alpha(time - anchor_t, anchor_alpha, p)
                     : decay_alpha(time - anchor_t, anchor_alpha, kappa);
    };
    // grid points strictly before t_end belong to the current segment
    auto fill_before = [&](double t_end) {
        while (gi < n_grid && grid[gi] < t_end) {
            sink.on_sample(gi, alpha_at(grid[gi]));
            ++gi;
        }
    };
    auto fill_rest = [&]() {
        while (gi < n_grid) {
            sink.on_sample(gi, alpha_at(grid[gi]));
            ++gi;
        }
    };
    auto freeze_rest = [&](double t_halt) {
        status = TerminalStatus::HaltedDiverged;
        halt_time = t_halt;
        anchor_alpha *= std::sqrt(opt.divergence_cap / std::norm(anchor_alpha));
        if (gi < n_grid) sink.on_frozen(gi);
        while (gi < n_grid) {
            sink.on_sample(gi, anchor_alpha);
            ++gi;
        }
    };

    if (opt.sampler == Sampler::WaitingTime) {
        if (laser)
            throw std::invalid_argument(
                "simulate: the waiting-time sampler requires feedback mode");
        while (true) {
            const auto wait = sample_waiting_time(alpha_at(t), p, rng);
            if (!wait) {
                fill_rest();
                status = TerminalStatus::HaltedVacuum;
                break;
            }
            const double t_emit = t + *wait;
            if (t_emit >= horizon) {
                fill_rest();
                break;
            }
            fill_before(t_emit);
            const bool detected = rng.next_uniform() <= p.eta;
            sink.on_event(t_emit, detected, detected);
            t = t_emit;
            if (detected && p.beta != Complex{0.0, 0.0}) {
                anchor_alpha = feedback_jump_map(alpha_at(t_emit), p.beta);
                anchor_t = t_emit;
                if (std::norm(anchor_alpha) > opt.divergence_cap) {
                    freeze_rest(t_emit);
                    break;
                }
            }
        }
    } else {
        while (t < horizon) {
            const Complex alpha_now = alpha_at(t);
            const double hazard = kappa * opt.dt * std::max(1.0, std::norm(alpha_now));
            double dt_eff = opt.dt;
            if (hazard > opt.max_step_hazard)
                dt_eff = opt.dt / std::ceil(hazard / opt.max_step_hazard);
            if (t + dt_eff > horizon) dt_eff = horizon - t;
            if (dt_eff <= 0.0) break;
            const StepResult step = step_fixed(alpha_now, dt_eff, p, rng,
                                               opt.max_step_hazard);
            const double t_next = t + dt_eff;
            fill_before(t_next);
            if (step.event) {
                sink.on_event(t + step.event->time, step.event->detected,
                              step.event->feedback_applied);
                for (int extra = 0; extra < step.extra_emissions; ++extra)
                    sink.on_event(t + step.event->time,
                                  rng.next_uniform() <= p.eta, false);
                if (step.event->feedback_applied && p.beta != Complex{0.0, 0.0}) {
                    anchor_alpha = step.alpha; // decay over the step, then displaced
                    anchor_t = t_next;
                    if (std::norm(anchor_alpha) > opt.divergence_cap) {
                        t = t_next;
                        freeze_rest(t_next);
                        break;
                    }
                }
            }
            t = t_next;
        }
        if (status == TerminalStatus::Completed) fill_rest();
    }

    if (halt_time_out) *halt_time_out = halt_time;
    return status;
}

} // namespace detail

// Simulate one trajectory, sampling alpha on the given grid. The grid must
// be strictly increasing inside [0, horizon].
Trajectory simulate(Complex alpha0, double horizon, const CavityParams& p,
                    RandomStream rng, std::span<const double> grid,
                    const SimulateOptions& opt = {});

// Fig-6-style endpoint classification. Vacuum: |alpha(horizon)| below the
// radius. Diverging: halted at the cap, or ended above cap_fraction of it.
Classification classify(const Trajectory& traj, double vacuum_radius, double horizon,
                        double divergence_cap = 1e4, double cap_fraction = 0.5);

} // namespace qjump
