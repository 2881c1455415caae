// bindings.cpp — pybind11 module exposing the main operations: analytic
// closed forms, single-trajectory simulation, ensemble statistics and the
// truncated-Fock oracle.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qjump/analytic.hpp"
#include "qjump/ensemble.hpp"
#include "qjump/fock.hpp"
#include "qjump/trajectory.hpp"

namespace py = pybind11;
using namespace qjump;

namespace {

Sampler sampler_from_string(const std::string& name) {
    if (name == "fixed-step") return Sampler::FixedStep;
    if (name == "waiting-time") return Sampler::WaitingTime;
    throw std::invalid_argument("sampler must be 'fixed-step' or 'waiting-time'");
}

SimulateOptions make_options(const std::string& sampler, double dt, double cap) {
    SimulateOptions opt;
    opt.sampler = sampler_from_string(sampler);
    opt.dt = dt;
    opt.divergence_cap = cap;
    return opt;
}

} // namespace

PYBIND11_MODULE(_qjump, m) {
    m.doc() = "quantum-trajectory simulator for a damped optical cavity with "
              "laser driving or detection-triggered feedback";

    py::enum_<DriveMode>(m, "DriveMode")
        .value("LaserDriven", DriveMode::LaserDriven)
        .value("Feedback", DriveMode::Feedback);

    py::class_<CavityParams>(m, "CavityParams")
        .def(py::init([](double kappa, double omega, double eta, Complex beta,
                         double omega_cav, DriveMode mode) {
                 CavityParams p{kappa, omega, eta, beta, omega_cav, mode};
                 return p;
             }),
             py::arg("kappa") = 1.0, py::arg("omega") = 0.0, py::arg("eta") = 0.0,
             py::arg("beta") = Complex(0.0, 0.0), py::arg("omega_cav") = 2.0 * M_PI,
             py::arg("mode") = DriveMode::LaserDriven)
        .def_readwrite("kappa", &CavityParams::kappa)
        .def_readwrite("omega", &CavityParams::omega)
        .def_readwrite("eta", &CavityParams::eta)
        .def_readwrite("beta", &CavityParams::beta)
        .def_readwrite("omega_cav", &CavityParams::omega_cav)
        .def_readwrite("mode", &CavityParams::mode);

    m.def("validate", &validate, py::arg("params"),
          "per-field violation messages; empty means valid");
    m.def(
        "schrodinger_amplitude",
        [](Complex alpha_interaction, double t, const CavityParams& p) {
            return to_schrodinger({alpha_interaction, Picture::Interaction}, t, p).value;
        },
        py::arg("alpha_interaction"), py::arg("t"), py::arg("params"),
        "rotate an interaction-picture amplitude into the Schroedinger picture");

    m.def("laser_alpha", &laser_alpha, py::arg("t"), py::arg("alpha0"), py::arg("params"));
    m.def("decay_alpha", &decay_alpha, py::arg("t"), py::arg("alpha0"), py::arg("kappa"));
    m.def("laser_emission_rate", &laser_emission_rate, py::arg("t"), py::arg("alpha0"),
          py::arg("params"));
    m.def("survival_probability", &survival_probability, py::arg("alpha"), py::arg("dt"),
          py::arg("kappa"));
    m.def("feedback_jump_map", &feedback_jump_map, py::arg("alpha"), py::arg("beta"));
    m.def("stability_margin", &stability_margin, py::arg("eta"), py::arg("beta"));

    py::class_<TrajectoryEvent>(m, "TrajectoryEvent")
        .def_readonly("time", &TrajectoryEvent::time)
        .def_readonly("detected", &TrajectoryEvent::detected)
        .def_readonly("feedback_applied", &TrajectoryEvent::feedback_applied);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("times", &Trajectory::times)
        .def_readonly("alphas", &Trajectory::alphas)
        .def_readonly("events", &Trajectory::events)
        .def_property_readonly("diverged",
                               [](const Trajectory& t) {
                                   return t.terminal_status ==
                                          TerminalStatus::HaltedDiverged;
                               })
        .def_readonly("halt_time", &Trajectory::halt_time);

    m.def(
        "simulate",
        [](Complex alpha0, double horizon, const CavityParams& p, std::uint64_t base_seed,
           std::uint64_t stream_index, const std::vector<double>& grid,
           const std::string& sampler, double dt, double divergence_cap) {
            return simulate(alpha0, horizon, p, RandomStream(base_seed, stream_index),
                            grid, make_options(sampler, dt, divergence_cap));
        },
        py::arg("alpha0"), py::arg("horizon"), py::arg("params"), py::arg("base_seed"),
        py::arg("stream_index"), py::arg("grid"), py::arg("sampler") = "waiting-time",
        py::arg("dt") = 1e-3, py::arg("divergence_cap") = 1e4);

    py::class_<EnsembleSeries>(m, "EnsembleSeries")
        .def_readonly("times", &EnsembleSeries::times)
        .def_readonly("mean_n", &EnsembleSeries::mean_n)
        .def_readonly("emission_rate", &EnsembleSeries::emission_rate)
        .def_readonly("stderr_n", &EnsembleSeries::stderr_n)
        .def_readonly("frozen_fraction", &EnsembleSeries::frozen_fraction)
        .def_readonly("n_trajectories", &EnsembleSeries::n_trajectories);

    m.def(
        "run_ensemble",
        [](Complex alpha0, const CavityParams& p, std::size_t n, const std::vector<double>& grid,
           std::uint64_t base_seed, const std::string& sampler, double dt,
           double divergence_cap, int threads) {
            EnsembleOptions opt;
            opt.sim = make_options(sampler, dt, divergence_cap);
            opt.threads = threads;
            return run_ensemble(alpha0, p, n, grid, base_seed, opt).series;
        },
        py::arg("alpha0"), py::arg("params"), py::arg("n_trajectories"), py::arg("grid"),
        py::arg("base_seed"), py::arg("sampler") = "waiting-time", py::arg("dt") = 1e-3,
        py::arg("divergence_cap") = 1e4, py::arg("threads") = 0);

    py::class_<ErgodicityReport>(m, "ErgodicityReport")
        .def_readonly("ensemble_average", &ErgodicityReport::ensemble_average)
        .def_readonly("time_averages", &ErgodicityReport::time_averages)
        .def_readonly("mean_avg", &ErgodicityReport::mean_avg)
        .def_readonly("min_avg", &ErgodicityReport::min_avg)
        .def_readonly("max_avg", &ErgodicityReport::max_avg)
        .def_readonly("sd_avg", &ErgodicityReport::sd_avg);

    m.def(
        "ergodicity_report",
        [](Complex alpha0, const CavityParams& p, std::size_t n,
           const std::vector<double>& grid, std::uint64_t base_seed,
           const std::string& sampler, double dt) {
            EnsembleOptions opt;
            opt.sim = make_options(sampler, dt, 1e4);
            return ergodicity_report(alpha0, p, n, grid, base_seed, opt);
        },
        py::arg("alpha0"), py::arg("params"), py::arg("n_trajectories"), py::arg("grid"),
        py::arg("base_seed"), py::arg("sampler") = "waiting-time", py::arg("dt") = 1e-3);

    py::class_<ChiMap>(m, "ChiMap")
        .def_readonly("re", &ChiMap::re)
        .def_readonly("im", &ChiMap::im)
        .def_readonly("chi", &ChiMap::chi)
        .def_readonly("undecided_fraction", &ChiMap::undecided_fraction)
        .def_readonly("n_re", &ChiMap::n_re)
        .def_readonly("n_im", &ChiMap::n_im);

    m.def(
        "chi_map",
        [](double re_min, double re_max, double im_min, double im_max, double step,
           const CavityParams& p, std::size_t n_per_cell, double horizon,
           double vacuum_radius, std::uint64_t base_seed) {
            ChiMapSpec spec{re_min, re_max, im_min, im_max, step};
            return chi_map(spec, p, n_per_cell, horizon, vacuum_radius, base_seed, {});
        },
        py::arg("re_min"), py::arg("re_max"), py::arg("im_min"), py::arg("im_max"),
        py::arg("step"), py::arg("params"), py::arg("n_per_cell"), py::arg("horizon"),
        py::arg("vacuum_radius") = 0.1, py::arg("base_seed") = 12345);

    py::register_exception<fock::TruncationError>(m, "TruncationError");

    m.def(
        "fock_mean_photon_series",
        [](Complex alpha0, const CavityParams& p, const std::vector<double>& grid,
           int levels, double dt, double top_level_tol) {
            const fock::Vector v = fock::coherent_vector(alpha0, levels);
            const fock::Matrix rho0 = v * v.adjoint();
            fock::IntegrateOptions opt;
            opt.dt = dt;
            opt.top_level_tol = top_level_tol;
            const auto series = fock::integrate(rho0, p, grid, opt);
            return py::make_tuple(series.times, series.mean_n);
        },
        py::arg("alpha0"), py::arg("params"), py::arg("grid"), py::arg("levels"),
        py::arg("dt") = 1e-3, py::arg("top_level_tol") = 1e-6,
        "integrate the master equation from a coherent state; returns (times, mean_n)");

    m.def(
        "displacement_matrix",
        [](Complex beta, int levels) {
            const fock::Matrix d = fock::displacement(beta, levels);
            std::vector<std::vector<Complex>> out(d.rows());
            for (Eigen::Index r = 0; r < d.rows(); ++r) {
                out[r].resize(d.cols());
                for (Eigen::Index c = 0; c < d.cols(); ++c) out[r][c] = d(r, c);
            }
            return out;
        },
        py::arg("beta"), py::arg("levels"));
}
