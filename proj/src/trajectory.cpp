#include "qjump/trajectory.hpp"

#include <algorithm>

namespace qjump {

namespace {

struct RecordingSink {
    Trajectory* out;
    void on_sample(std::size_t gi, Complex a) { out->alphas[gi] = a; }
    void on_event(double t, bool detected, bool applied) {
        out->events.push_back({t, detected, applied});
    }
    void on_frozen(std::size_t gi) { out->frozen_from = gi; }
};

void check_grid(std::span<const double> grid, double horizon) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0 && grid[i] <= horizon))
            throw std::invalid_argument("simulate: grid times must lie in [0, horizon]");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw std::invalid_argument("simulate: grid times must be strictly increasing");
    }
}

} // namespace

Trajectory simulate(Complex alpha0, double horizon, const CavityParams& p,
                    RandomStream rng, std::span<const double> grid,
                    const SimulateOptions& opt) {
    ensure_valid(p);
    if (!std::isfinite(alpha0.real()) || !std::isfinite(alpha0.imag()))
        throw std::invalid_argument("simulate: alpha0 must be finite");
    if (!(horizon > 0.0))
        throw std::invalid_argument("simulate: horizon must be positive");
    check_grid(grid, horizon);

    Trajectory out;
    out.base_seed = rng.base_seed();
    out.stream_index = rng.stream_index();
    out.times.assign(grid.begin(), grid.end());
    out.alphas.resize(grid.size());
    out.halt_time = horizon;

    RecordingSink sink{&out};
    out.terminal_status = detail::evolve_trajectory(alpha0, horizon, p, rng, grid, opt,
                                                    sink, &out.halt_time);
    return out;
}

Classification classify(const Trajectory& traj, double vacuum_radius, double horizon,
                        double divergence_cap, double cap_fraction) {
    if (traj.terminal_status == TerminalStatus::HaltedDiverged)
        return Classification::Diverging;
    if (traj.times.empty() || traj.times.back() < horizon * (1.0 - 1e-12))
        throw std::invalid_argument("classify: trajectory not simulated to the horizon");
    const double n_end = std::norm(traj.alphas.back());
    if (std::sqrt(n_end) < vacuum_radius) return Classification::Vacuum;
    if (n_end > cap_fraction * divergence_cap) return Classification::Diverging;
    return Classification::Undecided;
}

} // namespace qjump
