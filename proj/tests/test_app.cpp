#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qjump/app.hpp"

using namespace qjump::app;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "qjump_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t line_count(const std::string& text) {
    std::size_t n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

} // namespace

TEST_CASE("defaults reproduce the reference figure parameters") {
    const auto laser = default_config(Subcommand::LaserRun);
    CHECK(laser.mode == "laser");
    CHECK(laser.omega == 8.0);
    CHECK(laser.alpha0[0] == 0.0);
    CHECK(laser.kappa == 1.0);

    const auto fb = default_config(Subcommand::FeedbackRun);
    CHECK(fb.mode == "feedback");
    CHECK(fb.beta[0] == 2.0);
    CHECK(fb.eta == 0.5);
    CHECK(fb.alpha0[0] == 2.0);
    CHECK(fb.horizon == 10.0);

    const auto chi = default_config(Subcommand::ChiMap);
    CHECK(chi.grid_step == 0.1);
    CHECK(chi.vacuum_radius == 0.1);

    const auto oc = default_config(Subcommand::OracleCheck);
    CHECK(oc.omega == 2.0);
    CHECK(oc.fock_levels == 30);
}

TEST_CASE("config json: overrides, complex fields, unknown keys") {
    RunConfig cfg = default_config(Subcommand::FeedbackRun);
    apply_json(cfg, R"({"eta": 0.25, "beta": [1.5, -0.5], "alpha0": 2.0,
                        "betas": [0.5, 1.0], "n_trajectories": 42})",
               "test");
    CHECK(cfg.eta == 0.25);
    CHECK(cfg.beta[0] == 1.5);
    CHECK(cfg.beta[1] == -0.5);
    CHECK(cfg.alpha0[0] == 2.0);
    CHECK(cfg.alpha0[1] == 0.0);
    CHECK(cfg.betas.size() == 2);
    CHECK(cfg.n_trajectories == 42);

    CHECK_THROWS_AS(apply_json(cfg, R"({"no_such_key": 1})", "test"),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply_json(cfg, R"({"eta": "half"})", "test"), std::invalid_argument);
    CHECK_THROWS_AS(apply_json(cfg, "not json", "test"), std::invalid_argument);

    // round trip through the echo format
    RunConfig copy = default_config(Subcommand::FeedbackRun);
    apply_json(copy, to_json(cfg), "echo");
    CHECK(to_json(copy) == to_json(cfg));
}

TEST_CASE("config validation rejects bad field values before running") {
    RunConfig cfg = default_config(Subcommand::LaserRun);
    cfg.eta = 1.5;
    cfg.grid_points = 1;
    const auto errors = validate_config(cfg, Subcommand::LaserRun);
    CHECK(errors.size() == 2);

    cfg = default_config(Subcommand::LaserRun);
    cfg.sampler = "waiting-time";
    CHECK(!validate_config(cfg, Subcommand::LaserRun).empty());

    cfg = default_config(Subcommand::FeedbackRun);
    cfg.mode = "laser";
    CHECK(!validate_config(cfg, Subcommand::FeedbackRun).empty());

    cfg = default_config(Subcommand::LaserRun);
    cfg.n_trajectories = 10;
    CHECK_THROWS_AS(run_laser(cfg, "/proc/qjump/forbidden"), std::exception);
}

TEST_CASE("laser-run writes spiral, rate comparison and the config echo") {
    RunConfig cfg = default_config(Subcommand::LaserRun);
    cfg.n_trajectories = 300;
    cfg.grid_points = 21;
    cfg.spiral_points = 51;
    const auto dir = fresh_dir("laser");
    REQUIRE(run_laser(cfg, dir) == 0);

    const std::string spiral = slurp(dir / "spiral.csv");
    CHECK(spiral.rfind("t,re_alpha_S,im_alpha_S\n", 0) == 0);
    CHECK(line_count(spiral) == 52);

    const std::string rate = slurp(dir / "emission_rate.csv");
    CHECK(rate.rfind("t,I_analytic,I_montecarlo,stderr\n", 0) == 0);
    CHECK(line_count(rate) == 21); // header + 20 bins

    const auto echoed = nlohmann::json::parse(slurp(dir / "config.json"));
    CHECK(echoed["n_trajectories"] == 300);
    CHECK(echoed["omega"] == 8.0);
}

TEST_CASE("laser-run output is in kappa units regardless of kappa") {
    RunConfig a = default_config(Subcommand::LaserRun);
    a.n_trajectories = 200;
    a.grid_points = 11;
    a.spiral_points = 11;
    RunConfig b = a;
    b.kappa = 3.0;
    const auto dir_a = fresh_dir("kappa1");
    const auto dir_b = fresh_dir("kappa3");
    REQUIRE(run_laser(a, dir_a) == 0);
    REQUIRE(run_laser(b, dir_b) == 0);
    // the analytic column is a pure function of kappa-unit parameters
    auto analytic_column = [](const std::string& text) {
        std::vector<double> out;
        std::istringstream ss(text);
        std::string line;
        std::getline(ss, line);
        while (std::getline(ss, line)) {
            const auto c1 = line.find(',');
            const auto c2 = line.find(',', c1 + 1);
            out.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
        }
        return out;
    };
    const auto col_a = analytic_column(slurp(dir_a / "emission_rate.csv"));
    const auto col_b = analytic_column(slurp(dir_b / "emission_rate.csv"));
    REQUIRE(col_a.size() == col_b.size());
    for (std::size_t k = 0; k < col_a.size(); ++k)
        CHECK(col_a[k] == doctest::Approx(col_b[k]).epsilon(1e-12));
}

TEST_CASE("feedback-run writes trajectories, magnitudes, events and sweeps") {
    RunConfig cfg = default_config(Subcommand::FeedbackRun);
    cfg.n_trajectories = 200;
    cfg.grid_points = 41;
    cfg.display_trajectories = 4;
    cfg.betas = {0.5, 2.0};
    cfg.phases = {0.0, M_PI};
    const auto dir = fresh_dir("feedback");
    REQUIRE(run_feedback(cfg, dir) == 0);

    CHECK(slurp(dir / "ensemble.csv").rfind("t,I,stderr,frozen_fraction\n", 0) == 0);
    CHECK(fs::exists(dir / "ensemble_beta_0.5.csv"));
    CHECK(fs::exists(dir / "ensemble_beta_2.csv"));
    CHECK(fs::exists(dir / "ensemble_phase_0.csv"));
    CHECK(fs::exists(dir / "ensemble_phase_3.14159.csv"));

    const std::string traj = slurp(dir / "trajectories.csv");
    CHECK(traj.rfind("trajectory_index,t,re_alpha,im_alpha\n", 0) == 0);
    CHECK(line_count(traj) == 1 + 4 * 41);

    const std::string mags = slurp(dir / "magnitudes.csv");
    CHECK(mags.rfind("t,abs_alpha_0,abs_alpha_1,abs_alpha_2,abs_alpha_3\n", 0) == 0);
    CHECK(line_count(mags) == 1 + 41);

    CHECK(slurp(dir / "events.csv").rfind("trajectory_index,t_emit,detected\n", 0) == 0);
}

TEST_CASE("app runs are byte-identical across thread counts") {
    for (auto sub : {Subcommand::LaserRun, Subcommand::FeedbackRun}) {
        RunConfig cfg = default_config(sub);
        cfg.n_trajectories = 500;
        cfg.grid_points = 31;
        cfg.spiral_points = 31;
        cfg.threads = 1;
        const auto dir1 = fresh_dir(subcommand_name(sub) + "_t1");
        RunConfig cfg8 = cfg;
        cfg8.threads = 8;
        const auto dir8 = fresh_dir(subcommand_name(sub) + "_t8");
        REQUIRE(run(sub, cfg, dir1) == 0);
        REQUIRE(run(sub, cfg8, dir8) == 0);
        for (const auto& entry : fs::directory_iterator(dir1)) {
            const auto name = entry.path().filename();
            if (name == "config.json") continue; // echoes differ in the threads field
            CHECK_MESSAGE(slurp(entry.path()) == slurp(dir8 / name),
                          "file differs across thread counts: ", name.string());
        }
    }
}

TEST_CASE("chi-map subcommand: origin cell, eta=0 grid, csv schema") {
    RunConfig cfg = default_config(Subcommand::ChiMap);
    cfg.grid_re_min = -1.0;
    cfg.grid_re_max = 1.0;
    cfg.grid_im_min = 0.0;
    cfg.grid_im_max = 0.0;
    cfg.grid_step = 1.0;
    cfg.n_per_cell = 50;
    const auto dir = fresh_dir("chi");
    REQUIRE(run_chi_map(cfg, dir) == 0);
    const std::string text = slurp(dir / "chi.csv");
    CHECK(text.rfind("re_alpha0,im_alpha0,chi,count,undecided_fraction\n", 0) == 0);
    CHECK(line_count(text) == 4);
    // the origin row reports chi = 1 exactly
    CHECK(text.find("\n0,0,1,50,") != std::string::npos);

    cfg.eta = 0.0;
    const auto dir0 = fresh_dir("chi_eta0");
    REQUIRE(run_chi_map(cfg, dir0) == 0);
    std::istringstream ss(slurp(dir0 / "chi.csv"));
    std::string line;
    std::getline(ss, line);
    while (std::getline(ss, line))
        CHECK(line.find(",1,50,") != std::string::npos);
}

TEST_CASE("oracle-check: laser configuration passes and writes the summary") {
    RunConfig cfg = default_config(Subcommand::OracleCheck);
    cfg.n_trajectories = 500;
    cfg.grid_points = 21;
    cfg.horizon = 5.0;
    const auto dir = fresh_dir("oracle");
    REQUIRE(run_oracle_check(cfg, dir) == 0);
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary["pass"] == true);
    CHECK(summary["max_abs_deviation"].get<double>() < 1e-6);
    const std::string series = slurp(dir / "series.csv");
    CHECK(series.rfind("t,mean_n,emission_rate,stderr,frozen_fraction,source\n", 0) == 0);
    CHECK(series.find(",oracle\n") != std::string::npos);
    CHECK(series.find(",trajectory\n") != std::string::npos);
}

TEST_CASE("oracle-check: unbounded feedback growth exits with the physics code") {
    RunConfig cfg = default_config(Subcommand::OracleCheck);
    cfg.mode = "feedback";
    cfg.eta = 0.5;
    cfg.beta = {2.0, 0.0};
    cfg.alpha0 = {2.0, 0.0};
    cfg.horizon = 30.0;
    cfg.fock_levels = 40;
    cfg.n_trajectories = 100;
    cfg.grid_points = 31;
    const auto dir = fresh_dir("oracle_breach");
    CHECK(run_oracle_check(cfg, dir) == 2);
}

TEST_CASE("ergodicity subcommand: laser verdict ergodic, feedback non-ergodic") {
    RunConfig cfg = default_config(Subcommand::Ergodicity);
    cfg.n_trajectories = 100;
    cfg.grid_points = 201;
    const auto dir = fresh_dir("ergo_laser");
    REQUIRE(run_ergodicity(cfg, dir) == 0);
    auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary["verdict"] == "ergodic");

    RunConfig fb = default_config(Subcommand::Ergodicity);
    fb.mode = "feedback";
    fb.alpha0 = {2.0, 0.0};
    fb.horizon = 10.0;
    fb.grid_points = 101;
    fb.n_trajectories = 200;
    const auto dir2 = fresh_dir("ergo_feedback");
    REQUIRE(run_ergodicity(fb, dir2) == 0);
    summary = nlohmann::json::parse(slurp(dir2 / "summary.json"));
    CHECK(summary["verdict"] == "non-ergodic");
    const std::string tavg = slurp(dir2 / "time_averages.csv");
    CHECK(tavg.rfind("trajectory_index,time_average\n", 0) == 0);
    CHECK(line_count(tavg) == 201);
}
