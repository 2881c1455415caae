#include "qjump/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace qjump {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Per-trajectory record filled by a worker, consumed serially in index order.
struct TrajRecord {
    std::vector<double> n_at_grid;
    std::vector<std::uint32_t> bin_counts;
    std::vector<Complex> snapshot_vals;
    double time_average = 0.0;
    double first_emission = kNaN;
    std::size_t frozen_from = kNoFrozenIndex;
    bool diverged = false;
    bool no_event = true;
};

struct StatsSink {
    std::span<const double> grid;
    const std::vector<std::size_t>* snapshot_indices;
    bool collect_bins;
    TrajRecord* rec;
    std::size_t next_snapshot = 0;

    void on_sample(std::size_t gi, Complex a) {
        rec->n_at_grid[gi] = std::norm(a);
        if (next_snapshot < snapshot_indices->size() &&
            (*snapshot_indices)[next_snapshot] == gi) {
            rec->snapshot_vals[next_snapshot] = a;
            ++next_snapshot;
        }
    }
    void on_event(double t, bool /*detected*/, bool /*applied*/) {
        if (rec->no_event) {
            rec->no_event = false;
            rec->first_emission = t;
        }
        if (!collect_bins) return;
        // bin k covers [grid[k], grid[k+1])
        const auto it = std::upper_bound(grid.begin(), grid.end(), t);
        if (it == grid.begin() || it == grid.end()) return;
        ++rec->bin_counts[static_cast<std::size_t>(it - grid.begin()) - 1];
    }
    void on_frozen(std::size_t gi) {
        rec->frozen_from = gi;
        rec->diverged = true;
    }
};

double trapezoid_average(std::span<const double> grid, std::span<const double> values) {
    if (grid.size() < 2) return values.empty() ? 0.0 : values[0];
    double acc = 0.0;
    for (std::size_t k = 1; k < grid.size(); ++k)
        acc += 0.5 * (values[k] + values[k - 1]) * (grid[k] - grid[k - 1]);
    return acc / (grid.back() - grid.front());
}

// Runs trajectories 0..n-1 in fixed-size blocks: workers fill per-index
// records in parallel, then the block is consumed serially in index order.
template <class Compute, class Consume>
void run_blocked(std::size_t n, int threads, Compute&& compute, Consume&& consume) {
    const std::size_t block = 4096;
    const int n_threads = std::min<std::size_t>(resolve_threads(threads), block);
    std::vector<TrajRecord> slots(std::min(block, n == 0 ? 1 : n));

    for (std::size_t start = 0; start < n; start += block) {
        const std::size_t end = std::min(n, start + block);
        if (n_threads == 1) {
            for (std::size_t i = start; i < end; ++i) compute(i, slots[i - start]);
        } else {
            std::atomic<std::size_t> cursor{start};
            auto worker = [&]() {
                constexpr std::size_t chunk = 16;
                while (true) {
                    const std::size_t i0 = cursor.fetch_add(chunk);
                    if (i0 >= end) break;
                    const std::size_t i1 = std::min(end, i0 + chunk);
                    for (std::size_t i = i0; i < i1; ++i) compute(i, slots[i - start]);
                }
            };
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(n_threads));
            for (int w = 0; w < n_threads; ++w) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }
        for (std::size_t i = start; i < end; ++i) consume(i, slots[i - start]);
    }
}

} // namespace

EnsembleResult run_ensemble(Complex alpha0, const CavityParams& p, std::size_t n_traj,
                            std::span<const double> grid, std::uint64_t base_seed,
                            const EnsembleOptions& opt) {
    ensure_valid(p);
    if (n_traj < 1) throw std::invalid_argument("run_ensemble: need at least one trajectory");
    if (grid.empty()) throw std::invalid_argument("run_ensemble: empty output grid");
    const double horizon = grid.back();
    const std::size_t n_grid = grid.size();
    const std::size_t n_bins = opt.collect_event_rate && n_grid > 1 ? n_grid - 1 : 0;

    // retention guard: the streamed series is always O(grid); only explicit
    // per-trajectory retention scales with N
    std::size_t retained = 0;
    retained += opt.snapshot_indices.size() * n_traj * sizeof(Complex);
    if (opt.collect_time_averages) retained += n_traj * sizeof(double);
    if (opt.collect_first_emission) retained += n_traj * sizeof(double);
    if (retained > opt.memory_budget)
        throw std::runtime_error(
            "run_ensemble: requested per-trajectory retention exceeds the memory budget (" +
            std::to_string(retained) + " > " + std::to_string(opt.memory_budget) + " bytes)");

    auto snapshot_indices = opt.snapshot_indices;
    std::sort(snapshot_indices.begin(), snapshot_indices.end());
    for (std::size_t idx : snapshot_indices)
        if (idx >= n_grid)
            throw std::invalid_argument("run_ensemble: snapshot index out of range");

    EnsembleResult out;
    out.series.times.assign(grid.begin(), grid.end());
    out.series.n_trajectories = n_traj;
    if (opt.collect_time_averages) out.time_averages.resize(n_traj);
    if (opt.collect_first_emission) out.first_emission.resize(n_traj);
    out.snapshots.assign(snapshot_indices.size(), std::vector<Complex>(n_traj));

    std::vector<MomentAccumulator> n_acc(n_grid);
    std::vector<MomentAccumulator> bin_acc(n_bins);
    std::vector<std::size_t> frozen_count(n_grid, 0);

    auto compute = [&](std::size_t i, TrajRecord& rec) {
        rec.n_at_grid.assign(n_grid, 0.0);
        rec.bin_counts.assign(n_bins, 0);
        rec.snapshot_vals.assign(snapshot_indices.size(), Complex{});
        rec.time_average = 0.0;
        rec.first_emission = kNaN;
        rec.frozen_from = kNoFrozenIndex;
        rec.diverged = false;
        rec.no_event = true;

        StatsSink sink{grid, &snapshot_indices, n_bins > 0, &rec, 0};
        RandomStream rng(base_seed, i);
        detail::evolve_trajectory(alpha0, horizon, p, rng, grid, opt.sim, sink);
        if (opt.collect_time_averages)
            rec.time_average = trapezoid_average(grid, rec.n_at_grid);
    };
    auto consume = [&](std::size_t i, const TrajRecord& rec) {
        for (std::size_t k = 0; k < n_grid; ++k) n_acc[k].push(rec.n_at_grid[k]);
        for (std::size_t k = 0; k < n_bins; ++k)
            bin_acc[k].push(static_cast<double>(rec.bin_counts[k]));
        for (std::size_t k = rec.frozen_from; k < n_grid; ++k) ++frozen_count[k];
        for (std::size_t s = 0; s < snapshot_indices.size(); ++s)
            out.snapshots[s][i] = rec.snapshot_vals[s];
        if (opt.collect_time_averages) out.time_averages[i] = rec.time_average;
        if (opt.collect_first_emission) out.first_emission[i] = rec.first_emission;
        if (rec.diverged) ++out.n_diverged;
        if (rec.no_event) ++out.n_no_event;
    };
    run_blocked(n_traj, opt.threads, compute, consume);

    out.series.mean_n.resize(n_grid);
    out.series.emission_rate.resize(n_grid);
    out.series.stderr_n.resize(n_grid);
    out.series.frozen_fraction.resize(n_grid);
    for (std::size_t k = 0; k < n_grid; ++k) {
        out.series.mean_n[k] = n_acc[k].mean();
        out.series.emission_rate[k] = p.kappa * out.series.mean_n[k];
        out.series.stderr_n[k] = n_acc[k].stderr_of_mean();
        out.series.frozen_fraction[k] =
            static_cast<double>(frozen_count[k]) / static_cast<double>(n_traj);
    }
    if (n_bins > 0) {
        out.event_rate.n_trajectories = n_traj;
        out.event_rate.bin_mid.resize(n_bins);
        out.event_rate.rate.resize(n_bins);
        out.event_rate.stderr_rate.resize(n_bins);
        for (std::size_t k = 0; k < n_bins; ++k) {
            const double width = grid[k + 1] - grid[k];
            out.event_rate.bin_mid[k] = 0.5 * (grid[k] + grid[k + 1]);
            out.event_rate.rate[k] = bin_acc[k].mean() / width;
            out.event_rate.stderr_rate[k] = bin_acc[k].stderr_of_mean() / width;
        }
    }
    return out;
}

ChiMap chi_map(const ChiMapSpec& spec, const CavityParams& p, std::size_t n_per_cell,
               double horizon, double vacuum_radius, std::uint64_t base_seed,
               const EnsembleOptions& opt) {
    ensure_valid(p);
    if (!(vacuum_radius > 0.0))
        throw std::invalid_argument("chi_map: vacuum_radius must be positive");
    if (n_per_cell < 1) throw std::invalid_argument("chi_map: need trajectories per cell");
    if (!(spec.step > 0.0) || spec.re_max < spec.re_min || spec.im_max < spec.im_min)
        throw std::invalid_argument("chi_map: malformed grid spec");

    const auto cells_along = [&](double lo, double hi) {
        return static_cast<std::size_t>(std::floor((hi - lo) / spec.step + 1e-9)) + 1;
    };
    ChiMap map;
    map.n_re = cells_along(spec.re_min, spec.re_max);
    map.n_im = cells_along(spec.im_min, spec.im_max);
    const std::size_t n_cells = map.n_re * map.n_im;
    map.re.resize(n_cells);
    map.im.resize(n_cells);
    map.chi.resize(n_cells);
    map.undecided_fraction.resize(n_cells);
    map.counts.assign(n_cells, n_per_cell);

    const double grid_point[] = {horizon};
    const double radius2 = vacuum_radius * vacuum_radius;
    const double cap = opt.sim.divergence_cap;

    struct CellSink {
        double n_end = 0.0;
        bool frozen = false;
        void on_sample(std::size_t, Complex a) { n_end = std::norm(a); }
        void on_event(double, bool, bool) {}
        void on_frozen(std::size_t) { frozen = true; }
    };

    for (std::size_t ci = 0; ci < map.n_im; ++ci) {
        for (std::size_t cr = 0; cr < map.n_re; ++cr) {
            const std::size_t cell = ci * map.n_re + cr;
            const Complex a0(spec.re_min + static_cast<double>(cr) * spec.step,
                             spec.im_min + static_cast<double>(ci) * spec.step);
            map.re[cell] = a0.real();
            map.im[cell] = a0.imag();

            std::atomic<std::size_t> vac{0}, und{0};
            const std::uint64_t stream0 = static_cast<std::uint64_t>(cell) * n_per_cell;
            const int n_threads = resolve_threads(opt.threads);
            std::atomic<std::size_t> cursor{0};
            auto worker = [&]() {
                std::size_t local_vac = 0, local_und = 0;
                while (true) {
                    const std::size_t i0 = cursor.fetch_add(64);
                    if (i0 >= n_per_cell) break;
                    const std::size_t i1 = std::min(n_per_cell, i0 + 64);
                    for (std::size_t i = i0; i < i1; ++i) {
                        CellSink sink;
                        RandomStream rng(base_seed, stream0 + i);
                        detail::evolve_trajectory(a0, horizon, p, rng, grid_point,
                                                  opt.sim, sink);
                        if (!sink.frozen && sink.n_end < radius2)
                            ++local_vac;
                        else if (!sink.frozen && sink.n_end <= 0.5 * cap)
                            ++local_und;
                    }
                }
                vac += local_vac;
                und += local_und;
            };
            std::vector<std::thread> pool;
            for (int w = 0; w < n_threads; ++w) pool.emplace_back(worker);
            for (auto& th : pool) th.join();

            map.chi[cell] = static_cast<double>(vac) / static_cast<double>(n_per_cell);
            map.undecided_fraction[cell] =
                static_cast<double>(und) / static_cast<double>(n_per_cell);
        }
    }
    return map;
}

ErgodicityReport ergodicity_report(Complex alpha0, const CavityParams& p,
                                   std::size_t n_traj, std::span<const double> grid,
                                   std::uint64_t base_seed, const EnsembleOptions& opt) {
    EnsembleOptions local = opt;
    local.collect_time_averages = true;
    const EnsembleResult res = run_ensemble(alpha0, p, n_traj, grid, base_seed, local);

    ErgodicityReport report;
    report.ensemble_average = res.series.mean_n.back();
    report.time_averages = res.time_averages;
    MomentAccumulator acc;
    report.min_avg = std::numeric_limits<double>::infinity();
    report.max_avg = -std::numeric_limits<double>::infinity();
    for (double v : report.time_averages) {
        acc.push(v);
        report.min_avg = std::min(report.min_avg, v);
        report.max_avg = std::max(report.max_avg, v);
    }
    report.mean_avg = acc.mean();
    report.sd_avg = std::sqrt(acc.variance());
    return report;
}

std::vector<EnsembleSeries> phase_sweep(double alpha0_magnitude,
                                        std::span<const double> phases,
                                        const CavityParams& p, std::size_t n_traj,
                                        std::span<const double> grid,
                                        std::uint64_t base_seed,
                                        const EnsembleOptions& opt) {
    if (p.mode != DriveMode::Feedback)
        throw std::invalid_argument("phase_sweep: feedback mode only");
    std::vector<EnsembleSeries> out;
    out.reserve(phases.size());
    for (double phi : phases) {
        const Complex a0 = alpha0_magnitude * Complex(std::cos(phi), std::sin(phi));
        out.push_back(run_ensemble(a0, p, n_traj, grid, base_seed, opt).series);
    }
    return out;
}

DriftResidual drift_check(const EnsembleSeries& series,
                          std::span<const Complex> snapshot_alphas,
                          std::size_t grid_index, const CavityParams& p) {
    const std::size_t n_grid = series.times.size();
    if (n_grid < 2) throw std::invalid_argument("drift_check: series too short");
    if (grid_index >= n_grid) throw std::invalid_argument("drift_check: index out of range");
    if (snapshot_alphas.empty()) throw std::invalid_argument("drift_check: empty snapshot");

    const std::size_t lo = grid_index == 0 ? 0 : grid_index - 1;
    const std::size_t hi = grid_index + 1 >= n_grid ? n_grid - 1 : grid_index + 1;
    const double dt = series.times[hi] - series.times[lo];

    DriftResidual out;
    out.finite_difference = (series.emission_rate[hi] - series.emission_rate[lo]) / dt;
    const double se_fd = p.kappa *
        std::hypot(series.stderr_n[hi], series.stderr_n[lo]) / dt;

    MomentAccumulator integrand;
    for (const Complex& a : snapshot_alphas) {
        const double n = std::norm(a);
        const double gain = std::norm(a + p.beta) - n;
        integrand.push(-p.kappa * p.kappa * (1.0 - p.eta * gain) * n);
    }
    out.drift_estimate = integrand.mean();
    const double se_drift = integrand.stderr_of_mean();

    out.combined_se = std::hypot(se_fd, se_drift);
    out.residual_sigmas = out.combined_se > 0.0
        ? (out.finite_difference - out.drift_estimate) / out.combined_se
        : 0.0;
    return out;
}

} // namespace qjump
