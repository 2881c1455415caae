// ensemble.hpp — statistics over many trajectories.
//
// Trajectory i always uses random stream (base_seed, i), so results are a
// pure function of (base_seed, N, sampler, dt) and do not depend on how
// many worker threads run. Accumulation is streaming: per-trajectory
// moments are merged in fixed index order through a binary-counter tree
// (pairwise), which is both deterministic and accurate for N up to 1e7.
// The ensemble series itself never stores N x grid values; only explicitly
// requested per-trajectory retentions (snapshots, time averages, first
// emission times) allocate O(N), guarded by a memory budget.

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "qjump/params.hpp"
#include "qjump/trajectory.hpp"

namespace qjump {

// Streaming mean/variance with pairwise (binary-counter tree) merging in
// push order. Constant inputs give exactly zero variance.
class MomentAccumulator {
  public:
    void push(double x) {
        Node node{1, x, 0.0};
        std::uint64_t mask = count_;
        std::size_t level = 0;
        while (mask & 1u) {
            node = merge(levels_[level], node);
            mask >>= 1;
            ++level;
        }
        if (level >= levels_.size()) levels_.resize(level + 1);
        levels_[level] = node;
        ++count_;
    }

    std::uint64_t count() const { return count_; }

    double mean() const { return collapse().mean; }

    // unbiased sample variance
    double variance() const {
        const Node n = collapse();
        if (n.count < 2) return 0.0;
        return n.m2 / static_cast<double>(n.count - 1);
    }

    double stderr_of_mean() const {
        if (count_ < 2) return 0.0;
        return std::sqrt(variance() / static_cast<double>(count_));
    }

  private:
    struct Node {
        std::uint64_t count = 0;
        double mean = 0.0;
        double m2 = 0.0; // sum of squared deviations from the mean
    };

    static Node merge(const Node& a, const Node& b) {
        if (a.count == 0) return b;
        if (b.count == 0) return a;
        Node out;
        out.count = a.count + b.count;
        const double delta = b.mean - a.mean;
        const double nb = static_cast<double>(b.count), na = static_cast<double>(a.count);
        const double nt = static_cast<double>(out.count);
        out.mean = a.mean + delta * (nb / nt);
        out.m2 = a.m2 + b.m2 + delta * delta * (na * nb / nt);
        return out;
    }

    Node collapse() const {
        Node total;
        std::uint64_t mask = count_;
        for (std::size_t level = 0; mask != 0; mask >>= 1, ++level)
            if (mask & 1u) total = merge(levels_[level], total);
        return total;
    }

    std::uint64_t count_ = 0;
    std::vector<Node> levels_;
};

struct EnsembleSeries {
    std::vector<double> times;
    std::vector<double> mean_n;          // mean |alpha|^2 per grid point
    std::vector<double> emission_rate;   // kappa * mean_n
    std::vector<double> stderr_n;        // standard error of mean_n
    std::vector<double> frozen_fraction; // trajectories frozen at the cap by t
    std::size_t n_trajectories = 0;
};

// Event-count estimator of I(t): mean emissions per trajectory per bin,
// divided by the bin width. Bins are the grid intervals.
struct EventRateSeries {
    std::vector<double> bin_mid;
    std::vector<double> rate;
    std::vector<double> stderr_rate;
    std::size_t n_trajectories = 0;
};

struct EnsembleOptions {
    SimulateOptions sim{};
    int threads = 0; // 0 = hardware concurrency
    bool collect_event_rate = false;
    bool collect_time_averages = false;  // trapezoidal average of |alpha|^2
    bool collect_first_emission = false; // NaN when a trajectory never emits
    std::vector<std::size_t> snapshot_indices{};
    std::size_t memory_budget = std::size_t{1} << 30; // bytes, retention guard
};

struct EnsembleResult {
    EnsembleSeries series;
    EventRateSeries event_rate;
    std::vector<double> time_averages;
    std::vector<double> first_emission;
    std::vector<std::vector<Complex>> snapshots; // [snapshot index][trajectory]
    std::size_t n_diverged = 0;
    std::size_t n_no_event = 0;
};

// Horizon is grid.back(). Trajectory i uses stream (base_seed, i).
EnsembleResult run_ensemble(Complex alpha0, const CavityParams& p, std::size_t n_traj,
                            std::span<const double> grid, std::uint64_t base_seed,
                            const EnsembleOptions& opt = {});

struct ChiMapSpec {
    double re_min = -3.0, re_max = 3.0;
    double im_min = -3.0, im_max = 3.0;
    double step = 0.1;
};

struct ChiMap {
    std::vector<double> re, im; // flattened cell centres, re fastest
    std::vector<double> chi;
    std::vector<double> undecided_fraction;
    std::vector<std::size_t> counts;
    std::size_t n_re = 0, n_im = 0;
};

// chi = fraction of trajectories whose endpoint is classified Vacuum.
// Undecided trajectories count as not-vacuum and are reported separately.
ChiMap chi_map(const ChiMapSpec& spec, const CavityParams& p, std::size_t n_per_cell,
               double horizon, double vacuum_radius, std::uint64_t base_seed,
               const EnsembleOptions& opt = {});

struct ErgodicityReport {
    double ensemble_average = 0.0; // mean |alpha|^2 at the final grid time
    std::vector<double> time_averages;
    double mean_avg = 0.0, min_avg = 0.0, max_avg = 0.0, sd_avg = 0.0;
};

ErgodicityReport ergodicity_report(Complex alpha0, const CavityParams& p,
                                   std::size_t n_traj, std::span<const double> grid,
                                   std::uint64_t base_seed,
                                   const EnsembleOptions& opt = {});

// One series per phase, alpha0 = magnitude * exp(i phi), all phases sharing
// the same base seed (equal seeds make phi and phi + 2*pi bit-identical).
std::vector<EnsembleSeries> phase_sweep(double alpha0_magnitude,
                                        std::span<const double> phases,
                                        const CavityParams& p, std::size_t n_traj,
                                        std::span<const double> grid,
                                        std::uint64_t base_seed,
                                        const EnsembleOptions& opt = {});

struct DriftResidual {
    double finite_difference = 0.0; // dI/dt from the series
    double drift_estimate = 0.0;    // mean_photon_drift of the snapshot
    double combined_se = 0.0;
    double residual_sigmas = 0.0;
};

// Compares the finite-difference slope of the series' emission rate at a
// grid index against the analytic drift evaluated on a snapshot of alphas
// taken at that index.
DriftResidual drift_check(const EnsembleSeries& series,
                          std::span<const Complex> snapshot_alphas,
                          std::size_t grid_index, const CavityParams& p);

} // namespace qjump
