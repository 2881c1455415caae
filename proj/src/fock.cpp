#include "qjump/fock.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace qjump::fock {

namespace {

// cρc† : out(m,n) = sqrt((m+1)(n+1)) rho(m+1, n+1)
Matrix sandwich_annihilation(const Matrix& rho) {
    const Eigen::Index d = rho.rows();
    Matrix out = Matrix::Zero(d, d);
    for (Eigen::Index m = 0; m + 1 < d; ++m)
        for (Eigen::Index n = 0; n + 1 < d; ++n)
            out(m, n) = std::sqrt(double((m + 1) * (n + 1))) * rho(m + 1, n + 1);
    return out;
}

// {c†c, ρ} : out(m,n) = (m + n) rho(m,n)
Matrix anticommutator_number(const Matrix& rho) {
    const Eigen::Index d = rho.rows();
    Matrix out(d, d);
    for (Eigen::Index m = 0; m < d; ++m)
        for (Eigen::Index n = 0; n < d; ++n)
            out(m, n) = double(m + n) * rho(m, n);
    return out;
}

// [c + c†, ρ]
Matrix commutator_quadrature(const Matrix& rho) {
    const Eigen::Index d = rho.rows();
    Matrix out = Matrix::Zero(d, d);
    for (Eigen::Index m = 0; m < d; ++m) {
        for (Eigen::Index n = 0; n < d; ++n) {
            Complex v{0.0, 0.0};
            if (m + 1 < d) v += std::sqrt(double(m + 1)) * rho(m + 1, n); // c rho
            if (m >= 1) v += std::sqrt(double(m)) * rho(m - 1, n);        // c† rho
            if (n + 1 < d) v -= rho(m, n + 1) * std::sqrt(double(n + 1)); // rho c†
            if (n >= 1) v -= rho(m, n - 1) * std::sqrt(double(n));        // rho c
            out(m, n) = v;
        }
    }
    return out;
}

double mean_photon_number(const Matrix& rho) {
    double acc = 0.0;
    for (Eigen::Index n = 0; n < rho.rows(); ++n)
        acc += double(n) * rho(n, n).real();
    return acc;
}

} // namespace

int suggested_levels(double mu) {
    return static_cast<int>(std::ceil(mu + 8.0 * std::sqrt(std::max(mu, 1.0)) + 10.0));
}

Matrix annihilation(int levels) {
    if (levels < 1) throw std::invalid_argument("annihilation: need at least two levels");
    Matrix c = Matrix::Zero(levels + 1, levels + 1);
    for (int n = 1; n <= levels; ++n) c(n - 1, n) = std::sqrt(double(n));
    return c;
}

Matrix number_operator(int levels) {
    Matrix out = Matrix::Zero(levels + 1, levels + 1);
    for (int n = 0; n <= levels; ++n) out(n, n) = double(n);
    return out;
}

Vector coherent_vector(Complex alpha, int levels, double tail_tol, double* tail_mass) {
    const double n_mean = std::norm(alpha);
    if (n_mean > 0.5 * levels)
        throw TruncationError(
            "coherent_vector: |alpha|^2 = " + std::to_string(n_mean) +
                " too large for " + std::to_string(levels) + " levels",
            suggested_levels(n_mean));
    Vector v(levels + 1);
    // c_n = e^{-|a|^2/2} a^n / sqrt(n!), built iteratively
    Complex term = std::exp(Complex(-0.5 * n_mean, 0.0));
    v(0) = term;
    for (int n = 1; n <= levels; ++n) {
        term *= alpha / std::sqrt(double(n));
        v(n) = term;
    }
    const double captured = v.squaredNorm();
    const double tail = std::max(0.0, 1.0 - captured);
    if (tail_mass) *tail_mass = tail;
    if (tail > tail_tol)
        throw TruncationError(
            "coherent_vector: truncation tail mass " + std::to_string(tail) +
                " exceeds tolerance",
            suggested_levels(n_mean));
    return v / std::sqrt(captured);
}

Matrix displacement(Complex beta, int levels) {
    if (std::norm(beta) > 0.25 * levels)
        throw TruncationError(
            "displacement: |beta|^2 = " + std::to_string(std::norm(beta)) +
                " too large for " + std::to_string(levels) + " levels",
            static_cast<int>(std::ceil(4.0 * std::norm(beta))) + 8);
    const Matrix c = annihilation(levels);
    const Matrix generator = beta * c.adjoint() - std::conj(beta) * c;
    return generator.exp();
}

LindbladGenerator::LindbladGenerator(const CavityParams& p, int levels)
    : params_(p), levels_(levels) {
    ensure_valid(p);
    if (levels < 1) throw std::invalid_argument("LindbladGenerator: need levels >= 1");
    if (p.mode == DriveMode::Feedback && p.eta > 0.0)
        displacement_ = displacement(p.beta, levels);
}

const Matrix& LindbladGenerator::displacement_op() const {
    if (displacement_.size() == 0)
        throw std::logic_error("displacement_op: not a feedback generator");
    return displacement_;
}

Matrix LindbladGenerator::rhs(const Matrix& rho) const {
    if (rho.rows() != levels_ + 1 || rho.cols() != levels_ + 1)
        throw std::invalid_argument("lindblad_rhs: dimension mismatch");
    const double kappa = params_.kappa;
    const Matrix crc = sandwich_annihilation(rho);
    Matrix out = kappa * crc - 0.5 * kappa * anticommutator_number(rho);
    if (params_.mode == DriveMode::LaserDriven) {
        out += Complex(0.0, -0.5 * params_.omega) * commutator_quadrature(rho);
    } else if (params_.eta > 0.0) {
        out += (params_.eta * kappa) *
               (displacement_ * crc * displacement_.adjoint() - crc).eval();
    }
    return out;
}

Matrix lindblad_rhs(const Matrix& rho, const CavityParams& p) {
    return LindbladGenerator(p, static_cast<int>(rho.rows()) - 1).rhs(rho);
}

FockSeries integrate(const Matrix& rho0, const CavityParams& p,
                     std::span<const double> grid, const IntegrateOptions& opt) {
    if (grid.empty()) throw std::invalid_argument("integrate: empty output grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("integrate: grid must be strictly increasing");
    if (!(grid.front() >= 0.0)) throw std::invalid_argument("integrate: grid starts before 0");
    if (p.kappa * opt.dt > 1e-2 * (1.0 + 1e-12))
        throw std::invalid_argument("integrate: kappa*dt must not exceed 1e-2");
    if (rho0.rows() != rho0.cols() || rho0.rows() < 2)
        throw std::invalid_argument("integrate: rho0 must be square, >= 2 levels");

    const int levels = static_cast<int>(rho0.rows()) - 1;
    const LindbladGenerator gen(p, levels);

    FockSeries out;
    out.times.assign(grid.begin(), grid.end());
    out.mean_n.reserve(grid.size());
    if (opt.keep_states) out.states.reserve(grid.size());

    Matrix rho = rho0;
    double t = 0.0;
    std::size_t gi = 0;

    auto check_and_record = [&](bool at_grid_point) {
        const double trace_drift = std::abs(rho.trace().real() - 1.0);
        out.max_trace_drift = std::max(out.max_trace_drift, trace_drift);
        if (trace_drift > opt.trace_tol)
            throw std::runtime_error("integrate: trace drift " +
                                     std::to_string(trace_drift) + " at t = " +
                                     std::to_string(t));
        const double top = std::abs(rho(levels, levels).real());
        if (top > opt.top_level_tol) {
            const int suggest = std::max(2 * levels + 16, suggested_levels(
                                             mean_photon_number(rho)));
            throw TruncationError(
                "integrate: top-level population " + std::to_string(top) + " at t = " +
                    std::to_string(t) + " breaches the truncation; suggest N >= " +
                    std::to_string(suggest),
                suggest);
        }
        if (at_grid_point) {
            out.max_hermiticity_defect =
                std::max(out.max_hermiticity_defect,
                         (rho - rho.adjoint()).cwiseAbs().maxCoeff());
            out.mean_n.push_back(mean_photon_number(rho));
            if (opt.keep_states) out.states.push_back(rho);
        }
    };

    while (gi < grid.size()) {
        if (grid[gi] <= t + 1e-15) {
            check_and_record(true);
            ++gi;
            continue;
        }
        const double h = std::min(opt.dt, grid[gi] - t);
        const Matrix k1 = gen.rhs(rho);
        const Matrix k2 = gen.rhs(rho + (0.5 * h) * k1);
        const Matrix k3 = gen.rhs(rho + (0.5 * h) * k2);
        const Matrix k4 = gen.rhs(rho + h * k3);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
        check_and_record(false);
    }
    return out;
}

double observable_drift(const Matrix& rho, const Matrix& A, const CavityParams& p) {
    ensure_valid(p);
    if (A.rows() != A.cols() || A.rows() != rho.rows())
        throw std::invalid_argument("observable_drift: dimension mismatch");
    if ((A - A.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("observable_drift: A must be Hermitian");
    const int levels = static_cast<int>(rho.rows()) - 1;
    const Matrix c = annihilation(levels);
    const Matrix cd = c.adjoint();
    const Matrix num = cd * c;

    Matrix adjoint_gen = p.kappa * (cd * A * c) -
                         0.5 * p.kappa * (A * num + num * A);
    if (p.mode == DriveMode::LaserDriven) {
        const Matrix q = c + cd;
        adjoint_gen += Complex(0.0, 0.5 * p.omega) * (q * A - A * q);
    } else if (p.eta > 0.0) {
        const Matrix R = displacement(p.beta, levels);
        adjoint_gen += (p.eta * p.kappa) * (cd * R.adjoint() * A * R * c - cd * A * c);
    }
    return (rho * adjoint_gen).trace().real();
}

} // namespace qjump::fock
