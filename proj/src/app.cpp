#include "qjump/app.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "qjump/analytic.hpp"
#include "qjump/csv.hpp"
#include "qjump/ensemble.hpp"
#include "qjump/fock.hpp"
#include "qjump/trajectory.hpp"

namespace qjump::app {

using nlohmann::ordered_json;

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k)
        out[k] = lo + (hi - lo) * (static_cast<double>(k) / static_cast<double>(n - 1));
    out.back() = hi;
    return out;
}

std::string trim_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

CavityParams to_params(const RunConfig& cfg) {
    CavityParams p;
    p.kappa = cfg.kappa;
    p.omega = cfg.omega * cfg.kappa;
    p.eta = cfg.eta;
    p.beta = Complex(cfg.beta[0], cfg.beta[1]);
    p.omega_cav = cfg.omega_cav * cfg.kappa;
    p.mode = cfg.mode == "feedback" ? DriveMode::Feedback : DriveMode::LaserDriven;
    return p;
}

Sampler resolve_sampler(const RunConfig& cfg, DriveMode mode) {
    if (cfg.sampler == "fixed-step") return Sampler::FixedStep;
    if (cfg.sampler == "waiting-time") return Sampler::WaitingTime;
    return mode == DriveMode::LaserDriven ? Sampler::FixedStep : Sampler::WaitingTime;
}

EnsembleOptions to_ensemble_options(const RunConfig& cfg, DriveMode mode) {
    EnsembleOptions opt;
    opt.sim.sampler = resolve_sampler(cfg, mode);
    opt.sim.dt = cfg.dt / cfg.kappa;
    opt.sim.divergence_cap = cfg.divergence_cap;
    opt.threads = cfg.threads;
    return opt;
}

void ensure_config_valid(const RunConfig& cfg, Subcommand sub) {
    const auto errors = validate_config(cfg, sub);
    if (errors.empty()) return;
    std::string joined = "invalid configuration:";
    for (const auto& e : errors) joined += "\n  - " + e;
    throw std::invalid_argument(joined);
}

void write_config_echo(const RunConfig& cfg, const std::filesystem::path& dir) {
    std::ofstream out(dir / "config.json");
    if (!out) throw std::runtime_error("cannot open for writing: " +
                                       (dir / "config.json").string());
    out << to_json(cfg) << '\n';
    out.flush();
    if (!out) throw std::runtime_error("write failure on: " + (dir / "config.json").string());
}

// In kappa units I/kappa = mean_n and the stderr of I/kappa = stderr of mean_n.
void write_ensemble_csv(const std::filesystem::path& path, const EnsembleSeries& s,
                        double kappa) {
    CsvWriter csv(path);
    csv.header({"t", "I", "stderr", "frozen_fraction"});
    for (std::size_t k = 0; k < s.times.size(); ++k)
        csv.row()
            .col(s.times[k] * kappa)
            .col(s.emission_rate[k] / kappa)
            .col(s.stderr_n[k])
            .col(s.frozen_fraction[k]);
    csv.close();
}

} // namespace

Subcommand parse_subcommand(const std::string& name) {
    if (name == "laser-run") return Subcommand::LaserRun;
    if (name == "feedback-run") return Subcommand::FeedbackRun;
    if (name == "chi-map") return Subcommand::ChiMap;
    if (name == "oracle-check") return Subcommand::OracleCheck;
    if (name == "ergodicity") return Subcommand::Ergodicity;
    throw std::invalid_argument("unknown subcommand: " + name);
}

std::string subcommand_name(Subcommand sub) {
    switch (sub) {
        case Subcommand::LaserRun: return "laser-run";
        case Subcommand::FeedbackRun: return "feedback-run";
        case Subcommand::ChiMap: return "chi-map";
        case Subcommand::OracleCheck: return "oracle-check";
        case Subcommand::Ergodicity: return "ergodicity";
    }
    return {};
}

RunConfig default_config(Subcommand sub) {
    RunConfig cfg;
    switch (sub) {
        case Subcommand::LaserRun:
            cfg.mode = "laser";
            cfg.alpha0 = {0.0, 0.0};
            break;
        case Subcommand::FeedbackRun:
            cfg.mode = "feedback";
            cfg.alpha0 = {2.0, 0.0};
            break;
        case Subcommand::ChiMap:
            cfg.mode = "feedback";
            cfg.alpha0 = {0.0, 0.0};
            break;
        case Subcommand::OracleCheck:
            cfg.mode = "laser";
            cfg.omega = 2.0;
            cfg.alpha0 = {0.0, 0.0};
            break;
        case Subcommand::Ergodicity:
            cfg.mode = "laser";
            cfg.alpha0 = {0.0, 0.0};
            cfg.horizon = 50.0;
            cfg.grid_points = 501;
            cfg.n_trajectories = 1000;
            break;
    }
    return cfg;
}

namespace {

std::array<double, 2> complex_field(const nlohmann::json& v, const std::string& key) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw std::invalid_argument("config key '" + key + "' must be a number or [re, im]");
}

} // namespace

void apply_json(RunConfig& cfg, const std::string& json_text, const std::string& origin) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("cannot parse JSON from " + origin + ": " + e.what());
    }
    if (!j.is_object())
        throw std::invalid_argument("config from " + origin + " must be a JSON object");

    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "mode") cfg.mode = v.get<std::string>();
            else if (key == "kappa") cfg.kappa = v.get<double>();
            else if (key == "omega") cfg.omega = v.get<double>();
            else if (key == "eta") cfg.eta = v.get<double>();
            else if (key == "beta") cfg.beta = complex_field(v, key);
            else if (key == "omega_cav") cfg.omega_cav = v.get<double>();
            else if (key == "alpha0") cfg.alpha0 = complex_field(v, key);
            else if (key == "n_trajectories") cfg.n_trajectories = v.get<std::uint64_t>();
            else if (key == "horizon") cfg.horizon = v.get<double>();
            else if (key == "grid_points") cfg.grid_points = v.get<std::size_t>();
            else if (key == "base_seed") cfg.base_seed = v.get<std::uint64_t>();
            else if (key == "sampler") cfg.sampler = v.get<std::string>();
            else if (key == "dt") cfg.dt = v.get<double>();
            else if (key == "vacuum_radius") cfg.vacuum_radius = v.get<double>();
            else if (key == "divergence_cap") cfg.divergence_cap = v.get<double>();
            else if (key == "display_trajectories") cfg.display_trajectories = v.get<std::size_t>();
            else if (key == "spiral_points") cfg.spiral_points = v.get<std::size_t>();
            else if (key == "betas") cfg.betas = v.get<std::vector<double>>();
            else if (key == "phases") cfg.phases = v.get<std::vector<double>>();
            else if (key == "grid_re_min") cfg.grid_re_min = v.get<double>();
            else if (key == "grid_re_max") cfg.grid_re_max = v.get<double>();
            else if (key == "grid_im_min") cfg.grid_im_min = v.get<double>();
            else if (key == "grid_im_max") cfg.grid_im_max = v.get<double>();
            else if (key == "grid_step") cfg.grid_step = v.get<double>();
            else if (key == "n_per_cell") cfg.n_per_cell = v.get<std::size_t>();
            else if (key == "fock_levels") cfg.fock_levels = v.get<int>();
            else if (key == "oracle_dt") cfg.oracle_dt = v.get<double>();
            else if (key == "sigma_threshold") cfg.sigma_threshold = v.get<double>();
            else if (key == "deviation_allowance") cfg.deviation_allowance = v.get<double>();
            else if (key == "truncation_tolerance") cfg.truncation_tolerance = v.get<double>();
            else if (key == "dispersion_threshold") cfg.dispersion_threshold = v.get<double>();
            else if (key == "threads") cfg.threads = v.get<int>();
            else if (key == "paper_scale") cfg.paper_scale = v.get<bool>();
            else throw std::invalid_argument("unknown config key '" + key + "' from " + origin);
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("bad value in config from " + origin + ": " + e.what());
    }
}

void apply_paper_scale(RunConfig& cfg) {
    cfg.n_trajectories = std::max<std::uint64_t>(cfg.n_trajectories, 1000000);
    cfg.n_per_cell = std::max<std::size_t>(cfg.n_per_cell, 10000);
}

std::string to_json(const RunConfig& cfg) {
    ordered_json j;
    j["mode"] = cfg.mode;
    j["kappa"] = cfg.kappa;
    j["omega"] = cfg.omega;
    j["eta"] = cfg.eta;
    j["beta"] = {cfg.beta[0], cfg.beta[1]};
    j["omega_cav"] = cfg.omega_cav;
    j["alpha0"] = {cfg.alpha0[0], cfg.alpha0[1]};
    j["n_trajectories"] = cfg.n_trajectories;
    j["horizon"] = cfg.horizon;
    j["grid_points"] = cfg.grid_points;
    j["base_seed"] = cfg.base_seed;
    j["sampler"] = cfg.sampler;
    j["dt"] = cfg.dt;
    j["vacuum_radius"] = cfg.vacuum_radius;
    j["divergence_cap"] = cfg.divergence_cap;
    j["display_trajectories"] = cfg.display_trajectories;
    j["spiral_points"] = cfg.spiral_points;
    j["betas"] = cfg.betas;
    j["phases"] = cfg.phases;
    j["grid_re_min"] = cfg.grid_re_min;
    j["grid_re_max"] = cfg.grid_re_max;
    j["grid_im_min"] = cfg.grid_im_min;
    j["grid_im_max"] = cfg.grid_im_max;
    j["grid_step"] = cfg.grid_step;
    j["n_per_cell"] = cfg.n_per_cell;
    j["fock_levels"] = cfg.fock_levels;
    j["oracle_dt"] = cfg.oracle_dt;
    j["sigma_threshold"] = cfg.sigma_threshold;
    j["deviation_allowance"] = cfg.deviation_allowance;
    j["truncation_tolerance"] = cfg.truncation_tolerance;
    j["dispersion_threshold"] = cfg.dispersion_threshold;
    j["threads"] = cfg.threads;
    j["paper_scale"] = cfg.paper_scale;
    return j.dump(2);
}

std::vector<std::string> validate_config(const RunConfig& cfg, Subcommand sub) {
    std::vector<std::string> errors;
    if (cfg.mode != "laser" && cfg.mode != "feedback")
        errors.push_back("mode: must be \"laser\" or \"feedback\"");
    else {
        for (auto& e : validate(to_params(cfg))) errors.push_back(e);
    }
    if (cfg.n_trajectories < 1) errors.push_back("n_trajectories: must be >= 1");
    if (!(cfg.horizon > 0.0)) errors.push_back("horizon: must be positive");
    if (cfg.grid_points < 2) errors.push_back("grid_points: must be >= 2");
    if (!(cfg.dt > 0.0)) errors.push_back("dt: must be positive");
    if (!(cfg.vacuum_radius > 0.0)) errors.push_back("vacuum_radius: must be positive");
    if (!(cfg.divergence_cap > 1.0)) errors.push_back("divergence_cap: must exceed 1");
    if (cfg.sampler != "auto" && cfg.sampler != "fixed-step" && cfg.sampler != "waiting-time")
        errors.push_back("sampler: must be auto, fixed-step or waiting-time");
    if (cfg.mode == "laser" && cfg.sampler == "waiting-time")
        errors.push_back("sampler: waiting-time is only available in feedback mode");
    if (sub == Subcommand::FeedbackRun || sub == Subcommand::ChiMap) {
        if (cfg.mode != "feedback")
            errors.push_back("mode: this subcommand requires feedback mode");
    }
    if (sub == Subcommand::LaserRun && cfg.mode != "laser")
        errors.push_back("mode: laser-run requires laser mode");
    if (sub == Subcommand::ChiMap) {
        if (!(cfg.grid_step > 0.0)) errors.push_back("grid_step: must be positive");
        if (cfg.grid_re_max < cfg.grid_re_min || cfg.grid_im_max < cfg.grid_im_min)
            errors.push_back("grid ranges: max must be >= min");
        if (cfg.n_per_cell < 1) errors.push_back("n_per_cell: must be >= 1");
    }
    if (sub == Subcommand::OracleCheck) {
        if (cfg.fock_levels < 2) errors.push_back("fock_levels: must be >= 2");
        if (!(cfg.oracle_dt > 0.0) || cfg.oracle_dt > 1e-2)
            errors.push_back("oracle_dt: must lie in (0, 1e-2]");
        if (!(cfg.sigma_threshold > 0.0)) errors.push_back("sigma_threshold: must be positive");
        if (!(cfg.deviation_allowance >= 0.0))
            errors.push_back("deviation_allowance: must be non-negative");
        if (!(cfg.truncation_tolerance > 0.0))
            errors.push_back("truncation_tolerance: must be positive");
    }
    if (sub == Subcommand::Ergodicity && !(cfg.dispersion_threshold > 0.0))
        errors.push_back("dispersion_threshold: must be positive");
    return errors;
}

int run_laser(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    ensure_config_valid(cfg, Subcommand::LaserRun);
    std::filesystem::create_directories(out_dir);
    const CavityParams p = to_params(cfg);
    const Complex a0(cfg.alpha0[0], cfg.alpha0[1]);
    const double horizon = cfg.horizon / cfg.kappa;
    const auto grid = linspace(0.0, horizon, cfg.grid_points);

    EnsembleOptions opt = to_ensemble_options(cfg, p.mode);
    opt.collect_event_rate = true;
    const EnsembleResult res =
        run_ensemble(a0, p, cfg.n_trajectories, grid, cfg.base_seed, opt);

    // Schroedinger-picture spiral of the analytic solution
    {
        CsvWriter csv(out_dir / "spiral.csv");
        csv.header({"t", "re_alpha_S", "im_alpha_S"});
        const auto tgrid = linspace(0.0, horizon, cfg.spiral_points);
        for (double t : tgrid) {
            const CoherentAmplitude aS =
                to_schrodinger({laser_alpha(t, a0, p), Picture::Interaction}, t, p);
            csv.row().col(t * cfg.kappa).col(aS.value.real()).col(aS.value.imag());
        }
        csv.close();
    }
    // analytic vs Monte Carlo emission rate on the grid bins
    {
        CsvWriter csv(out_dir / "emission_rate.csv");
        csv.header({"t", "I_analytic", "I_montecarlo", "stderr"});
        for (std::size_t k = 0; k < res.event_rate.bin_mid.size(); ++k) {
            const double t_mid = res.event_rate.bin_mid[k];
            csv.row()
                .col(t_mid * cfg.kappa)
                .col(laser_emission_rate_expanded(t_mid, a0, p) / cfg.kappa)
                .col(res.event_rate.rate[k] / cfg.kappa)
                .col(res.event_rate.stderr_rate[k] / cfg.kappa);
        }
        csv.close();
    }
    write_config_echo(cfg, out_dir);
    return 0;
}

int run_feedback(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    ensure_config_valid(cfg, Subcommand::FeedbackRun);
    std::filesystem::create_directories(out_dir);
    const CavityParams p = to_params(cfg);
    const Complex a0(cfg.alpha0[0], cfg.alpha0[1]);
    const double horizon = cfg.horizon / cfg.kappa;
    const auto grid = linspace(0.0, horizon, cfg.grid_points);
    const EnsembleOptions opt = to_ensemble_options(cfg, p.mode);

    const EnsembleResult main_run =
        run_ensemble(a0, p, cfg.n_trajectories, grid, cfg.base_seed, opt);

    const std::size_t n_show = std::min<std::size_t>(cfg.display_trajectories,
                                                     cfg.n_trajectories);
    std::vector<Trajectory> shown;
    shown.reserve(n_show);
    for (std::size_t i = 0; i < n_show; ++i)
        shown.push_back(simulate(a0, horizon, p, RandomStream(cfg.base_seed, i), grid,
                                 opt.sim));

    std::vector<std::pair<double, EnsembleSeries>> beta_series;
    for (double b : cfg.betas) {
        CavityParams pb = p;
        pb.beta = Complex(b, 0.0);
        beta_series.emplace_back(
            b, run_ensemble(a0, pb, cfg.n_trajectories, grid, cfg.base_seed, opt).series);
    }
    std::vector<std::pair<double, EnsembleSeries>> phase_series;
    if (!cfg.phases.empty()) {
        const auto series = phase_sweep(std::abs(a0), cfg.phases, p, cfg.n_trajectories,
                                        grid, cfg.base_seed, opt);
        for (std::size_t i = 0; i < series.size(); ++i)
            phase_series.emplace_back(cfg.phases[i], series[i]);
    }

    write_ensemble_csv(out_dir / "ensemble.csv", main_run.series, cfg.kappa);
    for (const auto& [b, s] : beta_series)
        write_ensemble_csv(out_dir / ("ensemble_beta_" + trim_number(b) + ".csv"),
                           s, cfg.kappa);
    for (const auto& [phi, s] : phase_series)
        write_ensemble_csv(out_dir / ("ensemble_phase_" + trim_number(phi) + ".csv"),
                           s, cfg.kappa);

    {
        CsvWriter csv(out_dir / "trajectories.csv");
        csv.header({"trajectory_index", "t", "re_alpha", "im_alpha"});
        for (std::size_t i = 0; i < shown.size(); ++i)
            for (std::size_t k = 0; k < shown[i].times.size(); ++k)
                csv.row()
                    .col(i)
                    .col(shown[i].times[k] * cfg.kappa)
                    .col(shown[i].alphas[k].real())
                    .col(shown[i].alphas[k].imag());
        csv.close();
    }
    {
        CsvWriter csv(out_dir / "magnitudes.csv");
        std::vector<std::string> cols{"t"};
        for (std::size_t i = 0; i < shown.size(); ++i)
            cols.push_back("abs_alpha_" + std::to_string(i));
        csv.header(cols);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            auto row = csv.row();
            row.col(grid[k] * cfg.kappa);
            for (const auto& traj : shown) row.col(std::abs(traj.alphas[k]));
        }
        csv.close();
    }
    {
        CsvWriter csv(out_dir / "events.csv");
        csv.header({"trajectory_index", "t_emit", "detected"});
        for (std::size_t i = 0; i < shown.size(); ++i)
            for (const auto& ev : shown[i].events)
                csv.row().col(i).col(ev.time * cfg.kappa).col(std::size_t(ev.detected ? 1 : 0));
        csv.close();
    }
    write_config_echo(cfg, out_dir);
    return 0;
}

int run_chi_map(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    ensure_config_valid(cfg, Subcommand::ChiMap);
    std::filesystem::create_directories(out_dir);
    const CavityParams p = to_params(cfg);
    const double horizon = cfg.horizon / cfg.kappa;

    ChiMapSpec spec;
    spec.re_min = cfg.grid_re_min;
    spec.re_max = cfg.grid_re_max;
    spec.im_min = cfg.grid_im_min;
    spec.im_max = cfg.grid_im_max;
    spec.step = cfg.grid_step;

    const EnsembleOptions opt = to_ensemble_options(cfg, p.mode);
    const ChiMap map = chi_map(spec, p, cfg.n_per_cell, horizon, cfg.vacuum_radius,
                               cfg.base_seed, opt);

    CsvWriter csv(out_dir / "chi.csv");
    csv.header({"re_alpha0", "im_alpha0", "chi", "count", "undecided_fraction"});
    for (std::size_t k = 0; k < map.chi.size(); ++k)
        csv.row()
            .col(map.re[k])
            .col(map.im[k])
            .col(map.chi[k])
            .col(map.counts[k])
            .col(map.undecided_fraction[k]);
    csv.close();
    write_config_echo(cfg, out_dir);
    return 0;
}

int run_oracle_check(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    ensure_config_valid(cfg, Subcommand::OracleCheck);
    std::filesystem::create_directories(out_dir);
    const CavityParams p = to_params(cfg);
    const Complex a0(cfg.alpha0[0], cfg.alpha0[1]);
    const double horizon = cfg.horizon / cfg.kappa;
    const auto grid = linspace(0.0, horizon, cfg.grid_points);

    const EnsembleOptions opt = to_ensemble_options(cfg, p.mode);
    const EnsembleResult mc =
        run_ensemble(a0, p, cfg.n_trajectories, grid, cfg.base_seed, opt);

    fock::FockSeries oracle;
    try {
        const fock::Vector v = fock::coherent_vector(a0, cfg.fock_levels);
        const fock::Matrix rho0 = v * v.adjoint();
        fock::IntegrateOptions iopt;
        iopt.dt = cfg.oracle_dt / cfg.kappa;
        iopt.top_level_tol = cfg.truncation_tolerance;
        oracle = fock::integrate(rho0, p, grid, iopt);
    } catch (const fock::TruncationError& e) {
        std::cerr << "oracle-check: " << e.what() << "\n";
        write_config_echo(cfg, out_dir);
        return 2;
    }

    double max_abs = 0.0, max_rel = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double dev = std::abs(mc.series.mean_n[k] - oracle.mean_n[k]);
        const double bound = cfg.sigma_threshold * mc.series.stderr_n[k] +
                             cfg.deviation_allowance;
        max_abs = std::max(max_abs, dev);
        max_rel = std::max(max_rel, dev / bound);
    }
    const bool pass = max_rel <= 1.0;

    {
        CsvWriter csv(out_dir / "series.csv");
        csv.header({"t", "mean_n", "emission_rate", "stderr", "frozen_fraction", "source"});
        for (std::size_t k = 0; k < grid.size(); ++k)
            csv.row()
                .col(grid[k] * cfg.kappa)
                .col(mc.series.mean_n[k])
                .col(mc.series.emission_rate[k] / cfg.kappa)
                .col(mc.series.stderr_n[k])
                .col(mc.series.frozen_fraction[k])
                .col("trajectory");
        for (std::size_t k = 0; k < grid.size(); ++k)
            csv.row()
                .col(grid[k] * cfg.kappa)
                .col(oracle.mean_n[k])
                .col(p.kappa * oracle.mean_n[k] / cfg.kappa)
                .col(0.0)
                .col(0.0)
                .col("oracle");
        csv.close();
    }
    {
        ordered_json j;
        j["max_abs_deviation"] = max_abs;
        j["max_deviation_over_bound"] = max_rel;
        j["sigma_threshold"] = cfg.sigma_threshold;
        j["deviation_allowance"] = cfg.deviation_allowance;
        j["n_trajectories"] = cfg.n_trajectories;
        j["fock_levels"] = cfg.fock_levels;
        j["pass"] = pass;
        std::ofstream out(out_dir / "summary.json");
        out << j.dump(2) << '\n';
    }
    write_config_echo(cfg, out_dir);
    std::cout << "oracle-check: max deviation " << max_abs << " ("
              << max_rel << "x bound) -> " << (pass ? "pass" : "FAIL") << "\n";
    return pass ? 0 : 3;
}

int run_ergodicity(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    ensure_config_valid(cfg, Subcommand::Ergodicity);
    std::filesystem::create_directories(out_dir);
    const CavityParams p = to_params(cfg);
    const Complex a0(cfg.alpha0[0], cfg.alpha0[1]);
    const double horizon = cfg.horizon / cfg.kappa;
    const auto grid = linspace(0.0, horizon, cfg.grid_points);
    const EnsembleOptions opt = to_ensemble_options(cfg, p.mode);

    const ErgodicityReport report =
        ergodicity_report(a0, p, cfg.n_trajectories, grid, cfg.base_seed, opt);

    const double scale = std::max(std::abs(report.ensemble_average), 1e-12);
    const double relative_dispersion = report.sd_avg / scale;
    const bool ergodic = relative_dispersion <= cfg.dispersion_threshold;

    {
        CsvWriter csv(out_dir / "time_averages.csv");
        csv.header({"trajectory_index", "time_average"});
        for (std::size_t i = 0; i < report.time_averages.size(); ++i)
            csv.row().col(i).col(report.time_averages[i]);
        csv.close();
    }
    {
        ordered_json j;
        j["ensemble_average"] = report.ensemble_average;
        j["mean_time_average"] = report.mean_avg;
        j["min_time_average"] = report.min_avg;
        j["max_time_average"] = report.max_avg;
        j["sd_time_average"] = report.sd_avg;
        j["relative_dispersion"] = relative_dispersion;
        j["dispersion_threshold"] = cfg.dispersion_threshold;
        j["verdict"] = ergodic ? "ergodic" : "non-ergodic";
        std::ofstream out(out_dir / "summary.json");
        out << j.dump(2) << '\n';
    }
    write_config_echo(cfg, out_dir);
    std::cout << "ergodicity: dispersion " << report.sd_avg << " (relative "
              << relative_dispersion << ") -> "
              << (ergodic ? "ergodic" : "non-ergodic") << "\n";
    return 0;
}

int run(Subcommand sub, const RunConfig& cfg, const std::filesystem::path& out_dir) {
    switch (sub) {
        case Subcommand::LaserRun: return run_laser(cfg, out_dir);
        case Subcommand::FeedbackRun: return run_feedback(cfg, out_dir);
        case Subcommand::ChiMap: return run_chi_map(cfg, out_dir);
        case Subcommand::OracleCheck: return run_oracle_check(cfg, out_dir);
        case Subcommand::Ergodicity: return run_ergodicity(cfg, out_dir);
    }
    return 1;
}

} // namespace qjump::app
