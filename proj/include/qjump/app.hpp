// app.hpp — run configuration and the subcommand drivers behind the CLI.
//
// All config values use kappa units: times in 1/kappa, rates in kappa, and
// the output files follow the same convention (kappa itself defaults to 1).
// Every field has a default; the fully defaulted config of each subcommand
// reproduces the reference figure parameters (Omega = 8 kappa, beta = 2,
// eta = 0.5, and so on).

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qjump/params.hpp"

namespace qjump::app {

enum class Subcommand { LaserRun, FeedbackRun, ChiMap, OracleCheck, Ergodicity };

Subcommand parse_subcommand(const std::string& name);
std::string subcommand_name(Subcommand sub);

struct RunConfig {
    std::string mode;                 // "laser" | "feedback"
    double kappa = 1.0;
    double omega = 8.0;               // kappa units
    double eta = 0.5;
    std::array<double, 2> beta{2.0, 0.0};
    double omega_cav = 2.0 * M_PI;    // kappa units; presentation only
    std::array<double, 2> alpha0{0.0, 0.0};
    std::uint64_t n_trajectories = 10000;
    double horizon = 10.0;            // units 1/kappa
    std::size_t grid_points = 101;
    std::uint64_t base_seed = 12345;
    std::string sampler = "auto";     // auto | fixed-step | waiting-time
    double dt = 1e-3;                 // units 1/kappa
    double vacuum_radius = 0.1;
    double divergence_cap = 1e4;      // cap on |alpha|^2
    std::size_t display_trajectories = 10;
    std::size_t spiral_points = 2001;
    std::vector<double> betas;        // feedback-run sweep (real values)
    std::vector<double> phases;       // feedback-run sweep, alpha0 = |alpha0| e^{i phi}
    // chi-map grid
    double grid_re_min = -3.0, grid_re_max = 3.0;
    double grid_im_min = -3.0, grid_im_max = 3.0;
    double grid_step = 0.1;
    std::size_t n_per_cell = 1000;
    // oracle-check
    int fock_levels = 30;
    double oracle_dt = 5e-4;          // units 1/kappa
    double sigma_threshold = 3.0;
    double deviation_allowance = 1e-6;
    double truncation_tolerance = 1e-6;
    // ergodicity
    double dispersion_threshold = 0.1;
    int threads = 0;
    bool paper_scale = false;
};

// Defaults per subcommand (figure parameters where the reference states them).
RunConfig default_config(Subcommand sub);

// Merge a JSON object (file or override) onto cfg. Unknown keys are an
// error; values must match field types. Complex fields accept [re, im] or
// a plain number.
void apply_json(RunConfig& cfg, const std::string& json_text, const std::string& origin);

// Materialize the --paper-scale trajectory counts.
void apply_paper_scale(RunConfig& cfg);

// Full resolved-config echo written into every output directory.
std::string to_json(const RunConfig& cfg);

// Field-level validation; returns one message per violation.
std::vector<std::string> validate_config(const RunConfig& cfg, Subcommand sub);

// Exit codes: 0 success, 1 validation error, 2 runtime/physics error,
// 3 acceptance-check failure (oracle-check only). Drivers throw
// std::invalid_argument for validation problems; the CLI maps exceptions
// onto the exit codes.
int run_laser(const RunConfig& cfg, const std::filesystem::path& out_dir);
int run_feedback(const RunConfig& cfg, const std::filesystem::path& out_dir);
int run_chi_map(const RunConfig& cfg, const std::filesystem::path& out_dir);
int run_oracle_check(const RunConfig& cfg, const std::filesystem::path& out_dir);
int run_ergodicity(const RunConfig& cfg, const std::filesystem::path& out_dir);

int run(Subcommand sub, const RunConfig& cfg, const std::filesystem::path& out_dir);

} // namespace qjump::app
