#include <doctest.h>

#include <random>

#include "qjump/analytic.hpp"
#include "qjump/fock.hpp"
#include "test_support.hpp"

using namespace qjump;
using fock::Matrix;
using fock::Vector;
namespace ts = test_support;

namespace {

CavityParams laser_params(double omega) {
    CavityParams p;
    p.omega = omega;
    p.mode = DriveMode::LaserDriven;
    return p;
}

CavityParams feedback_params(double eta, Complex beta) {
    CavityParams p;
    p.eta = eta;
    p.beta = beta;
    p.mode = DriveMode::Feedback;
    return p;
}

// Generalized Laguerre polynomial L_n^{(k)}(x) by the three-term recurrence.
double laguerre(int n, int k, double x) {
    if (n == 0) return 1.0;
    double lm1 = 1.0;
    double l = 1.0 + k - x;
    for (int m = 1; m < n; ++m) {
        const double next = ((2 * m + 1 + k - x) * l - (m + k) * lm1) / (m + 1);
        lm1 = l;
        l = next;
    }
    return l;
}

// Closed-form displacement matrix element <m|D(beta)|n> for m >= n:
//   sqrt(n!/m!) beta^{m-n} e^{-|beta|^2/2} L_n^{(m-n)}(|beta|^2)
Complex displacement_element(int m, int n, Complex beta) {
    const bool swap = m < n;
    if (swap) {
        std::swap(m, n);
        beta = -std::conj(beta);
    }
    double log_ratio = 0.0; // log(n!/m!)
    for (int j = n + 1; j <= m; ++j) log_ratio -= std::log(double(j));
    const double x = std::norm(beta);
    const Complex pw = std::pow(beta, m - n);
    return std::exp(0.5 * log_ratio - 0.5 * x) * pw * laguerre(n, m - n, x);
}

Matrix random_hermitian(int dim, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix m(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) m(r, c) = Complex(u(gen), u(gen));
    return 0.5 * (m + Matrix(m.adjoint()));
}

Matrix coherent_density(Complex alpha, int levels) {
    const Vector v = fock::coherent_vector(alpha, levels);
    return v * v.adjoint();
}

} // namespace

TEST_CASE("coherent_vector: vacuum, Poisson mean, eigenstate property") {
    const Vector vac = fock::coherent_vector({0.0, 0.0}, 10);
    CHECK(vac(0) == Complex(1.0, 0.0));
    CHECK(vac.tail(10).norm() == 0.0);

    const int levels = 30;
    const Vector v = fock::coherent_vector({2.0, 0.0}, levels);
    // direct series for the mean photon number
    double mean = 0.0;
    for (int n = 0; n <= levels; ++n) mean += n * std::norm(v(n));
    CHECK(mean == doctest::Approx(4.0).epsilon(1e-8));

    const Matrix c = fock::annihilation(levels);
    const Vector cv = c * v;
    CHECK((cv - Complex(2.0, 0.0) * v).norm() < 1e-6); // up to the truncation tail

    double tail = 1.0;
    (void)fock::coherent_vector({1.0, 1.0}, levels, 1e-8, &tail);
    CHECK(tail < 1e-8);
}

TEST_CASE("coherent_vector rejects too-small truncations") {
    CHECK_THROWS_AS((void)fock::coherent_vector({4.0, 0.0}, 16), fock::TruncationError);
    try {
        (void)fock::coherent_vector({4.0, 0.0}, 16);
    } catch (const fock::TruncationError& e) {
        CHECK(e.suggested_levels > 16);
    }
}

TEST_CASE("displacement: identity, vacuum overlap, closed-form elements") {
    const int levels = 30;
    CHECK((fock::displacement({0.0, 0.0}, levels) -
           Matrix::Identity(levels + 1, levels + 1)).norm() < 1e-14);

    const Complex beta{0.7, 0.3};
    const Matrix d = fock::displacement(beta, levels);
    CHECK(std::abs(d(0, 0) - std::exp(-0.5 * std::norm(beta))) < 1e-12);

    // interior elements against the Laguerre closed form; the truncated
    // exponential only deviates near the boundary rows and columns
    const int interior = levels - 4 - 8; // 4 ceil(|beta|^2) + 8
    for (int m = 0; m <= interior; ++m)
        for (int n = 0; n <= interior; ++n)
            CHECK(std::abs(d(m, n) - displacement_element(m, n, beta)) < 1e-11);
}

TEST_CASE("displacement acts as D(beta)|alpha> ~ |alpha+beta>") {
    const int levels = 60;
    const Matrix d = fock::displacement({2.0, 0.0}, levels);

    // D(beta)|0> is the coherent state |beta>
    Vector from_vacuum = d.col(0);
    const Vector coherent2 = fock::coherent_vector({2.0, 0.0}, levels);
    CHECK((from_vacuum - coherent2).norm() < 1e-10);

    // photon-number distribution of D(2)|2> matches Poisson(16)
    const Vector shifted = d * coherent2;
    double worst = 0.0;
    double log_fact = 0.0;
    for (int n = 0; n <= levels; ++n) {
        if (n > 0) log_fact += std::log(double(n));
        const double poisson = std::exp(-16.0 + n * std::log(16.0) - log_fact);
        worst = std::max(worst, std::abs(std::norm(shifted(n)) - poisson));
    }
    CHECK(worst < 1e-8);

    // D(-beta) inverts D(beta) away from the truncation boundary
    const Matrix inv = fock::displacement({-2.0, 0.0}, levels) * d;
    const int interior = levels - 4 * 4 - 8; // |beta|^2 = 4
    CHECK((inv.topLeftCorner(interior, interior) -
           Matrix::Identity(interior, interior)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("displacement unitarity defect is confined to the boundary") {
    const int levels = 60;
    const Matrix d = fock::displacement({2.0, 0.0}, levels);
    const Matrix defect = d.adjoint() * d - Matrix::Identity(levels + 1, levels + 1);
    const int interior = levels - 4 * 4 - 8;
    CHECK(defect.topLeftCorner(interior, interior).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("lindblad_rhs: stationary vacuum, driven vacuum, trace-free") {
    const int levels = 24; // displacement(beta = 2) needs |beta|^2 <= levels/4
    Matrix vac = Matrix::Zero(levels + 1, levels + 1);
    vac(0, 0) = 1.0;

    CHECK(fock::lindblad_rhs(vac, feedback_params(0.5, {2.0, 0.0})).cwiseAbs().maxCoeff()
          < 1e-14);

    const Matrix driven = fock::lindblad_rhs(vac, laser_params(2.0));
    CHECK(driven.cwiseAbs().maxCoeff() > 0.1); // the commutator term acts on |0><0|
    // dissipator vanishes on the vacuum: compare against the bare commutator
    const Matrix c = fock::annihilation(levels);
    const Matrix q = c + Matrix(c.adjoint());
    const Matrix commutator = Complex(0, -1.0) * (q * vac - vac * q);
    CHECK((driven - commutator).cwiseAbs().maxCoeff() < 1e-14);

    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const Matrix rho = random_hermitian(levels + 1, seed);
        for (const auto& p :
             {laser_params(3.0), feedback_params(0.4, {1.5, -0.5})}) {
            const Matrix rhs = fock::lindblad_rhs(rho, p);
            CHECK(std::abs(rhs.trace()) < 1e-12);
            CHECK((rhs - rhs.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("adjoint consistency: trace(A L(rho)) equals observable_drift") {
    const int levels = 14;
    for (std::uint64_t seed : {10u, 20u, 30u}) {
        const Matrix rho = random_hermitian(levels + 1, seed);
        const Matrix a = random_hermitian(levels + 1, seed + 1000);
        for (const auto& p :
             {laser_params(2.5), feedback_params(0.6, {1.2, 0.4}),
              feedback_params(0.0, {0.0, 0.0})}) {
            const double via_rhs = (a * fock::lindblad_rhs(rho, p)).trace().real();
            const double via_adjoint = fock::observable_drift(rho, a, p);
            CHECK(std::abs(via_rhs - via_adjoint) < 1e-10);
        }
    }
}

TEST_CASE("observable_drift: identity, photon number, linear limit") {
    const int levels = 40;
    const auto p = feedback_params(0.5, {2.0, 0.0});
    const Matrix rho = coherent_density({0.05, 0.0}, levels);
    const Matrix eye = Matrix::Identity(levels + 1, levels + 1);
    CHECK(std::abs(fock::observable_drift(rho, eye, p)) < 1e-12);

    const Matrix num = fock::number_operator(levels);
    // exact coherent-state value: -kappa (1 - eta(|a+b|^2 - |a|^2)) |a|^2
    const double n0 = 0.0025;
    const double exact = -(1.0 - 0.5 * (std::norm(Complex(2.05, 0.0)) - n0)) * n0;
    CHECK(fock::observable_drift(rho, num, p) == doctest::Approx(exact).epsilon(1e-6));
    CHECK(fock::observable_drift(rho, num, p) > 0.0); // above threshold

    const auto p0 = feedback_params(0.0, {0.0, 0.0});
    const Matrix rho1 = coherent_density({1.0, 0.5}, levels);
    CHECK(fock::observable_drift(rho1, num, p0) ==
          doctest::Approx(-1.25).epsilon(1e-9)); // -kappa <n>

    CHECK_THROWS_AS(fock::observable_drift(rho, fock::annihilation(levels), p),
                    std::invalid_argument);
}

TEST_CASE("integrate: laser oracle matches the exact coherent solution to 1e-6") {
    const auto p = laser_params(2.0);
    const int levels = 30;
    Matrix rho0 = Matrix::Zero(levels + 1, levels + 1);
    rho0(0, 0) = 1.0;
    std::vector<double> grid(101);
    for (int k = 0; k <= 100; ++k) grid[k] = 0.1 * k;

    const auto series = fock::integrate(rho0, p, grid, {});
    REQUIRE(series.mean_n.size() == grid.size());
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
        worst = std::max(worst, std::abs(series.mean_n[k] -
                                         std::norm(laser_alpha(grid[k], {0, 0}, p))));
    CHECK(worst < 1e-6);
    CHECK(series.max_trace_drift < 1e-8);
    CHECK(series.max_hermiticity_defect < 1e-10);
}

TEST_CASE("integrate: feedback vacuum is stationary; eta=0 is pure decay") {
    const int levels = 30;
    const auto p = feedback_params(0.5, {2.0, 0.0});
    Matrix vac = Matrix::Zero(levels + 1, levels + 1);
    vac(0, 0) = 1.0;
    std::vector<double> grid{0.0, 1.0, 2.0, 3.0};
    const auto series = fock::integrate(vac, p, grid, {});
    for (double n : series.mean_n) CHECK(std::abs(n) < 1e-12);

    const auto p0 = feedback_params(0.0, {0.0, 0.0});
    const Matrix rho0 = coherent_density({2.0, 0.0}, levels);
    std::vector<double> grid2(51);
    for (int k = 0; k <= 50; ++k) grid2[k] = 0.1 * k;
    const auto decay = fock::integrate(rho0, p0, grid2, {});
    double worst = 0.0;
    for (std::size_t k = 0; k < grid2.size(); ++k)
        worst = std::max(worst,
                         std::abs(decay.mean_n[k] - 4.0 * std::exp(-grid2[k])));
    CHECK(worst < 1e-6);
}

TEST_CASE("integrate: runaway feedback growth breaches the truncation") {
    const int levels = 40;
    const auto p = feedback_params(0.5, {2.0, 0.0});
    const Matrix rho0 = coherent_density({2.0, 0.0}, levels);
    std::vector<double> grid{0.0, 10.0, 20.0, 30.0};
    CHECK_THROWS_AS((void)fock::integrate(rho0, p, grid, {}), fock::TruncationError);
}

TEST_CASE("integrate validates the step size") {
    Matrix vac = Matrix::Zero(11, 11);
    vac(0, 0) = 1.0;
    fock::IntegrateOptions opt;
    opt.dt = 0.02;
    std::vector<double> grid{0.0, 1.0};
    CHECK_THROWS_AS((void)fock::integrate(vac, laser_params(1.0), grid, opt),
                    std::invalid_argument);
}
