// fock.hpp — independent validation path: the two master equations
// integrated in a truncated Fock basis {|0>, ..., |N>}.
//
// Everything here is deliberately separate from the trajectory engine; the
// only shared input is CavityParams. Dense matrices, desk scale (N <= 200).

#pragma once

#include <Eigen/Dense>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qjump/params.hpp"

namespace qjump::fock {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

class TruncationError : public std::runtime_error {
  public:
    TruncationError(const std::string& msg, int suggested)
        : std::runtime_error(msg), suggested_levels(suggested) {}
    int suggested_levels;
};

// <m|c|n> = sqrt(n) delta_{m,n-1}; matrices are (levels+1) x (levels+1)
Matrix annihilation(int levels);
Matrix number_operator(int levels);

// Coherent-state column e^{-|a|^2/2} a^n / sqrt(n!), renormalized on the
// truncated space. Throws TruncationError when the dropped tail mass
// exceeds tail_tol or when |alpha|^2 > levels/2.
Vector coherent_vector(Complex alpha, int levels, double tail_tol = 1e-8,
                       double* tail_mass = nullptr);

// D(beta) = exp(beta c^dag - beta^* c) via scaling-and-squaring matrix
// exponential. Unitary away from the truncation boundary. Requires
// |beta|^2 <= levels/4.
Matrix displacement(Complex beta, int levels);

// Lindblad generator for the active drive mode, with the displacement
// operator cached across calls.
class LindbladGenerator {
  public:
    LindbladGenerator(const CavityParams& p, int levels);

    Matrix rhs(const Matrix& rho) const;
    int levels() const { return levels_; }
    const Matrix& displacement_op() const;

  private:
    CavityParams params_;
    int levels_;
    Matrix displacement_; // feedback mode only
};

// Convenience wrapper used by tests and one-off callers.
Matrix lindblad_rhs(const Matrix& rho, const CavityParams& p);

struct IntegrateOptions {
    double dt = 1e-3;              // kappa * dt must be <= 1e-2
    double top_level_tol = 1e-6;   // breach when rho(N,N) exceeds this
    double trace_tol = 1e-8;
    bool keep_states = false;
};

struct FockSeries {
    std::vector<double> times;
    std::vector<double> mean_n; // <c^dag c>(t) on the output grid
    std::vector<Matrix> states; // populated when keep_states is set
    double max_trace_drift = 0.0;
    double max_hermiticity_defect = 0.0;
};

// Classical RK4 over [0, grid.back()], reporting <c^dag c> at each grid
// time. Throws TruncationError when the top-level population crosses
// top_level_tol, naming a suggested larger truncation.
FockSeries integrate(const Matrix& rho0, const CavityParams& p,
                     std::span<const double> grid, const IntegrateOptions& opt = {});

// d<A>/dt evaluated on rho through the adjoint generator:
//   (kappa/2) <2 c^dag A c - [A, c^dag c]_+> + eta kappa <c^dag R^dag A R c - c^dag A c>.
// A must be Hermitian. Equals trace(A * lindblad_rhs(rho)).
double observable_drift(const Matrix& rho, const Matrix& A, const CavityParams& p);

// Poisson-tail truncation rule: smallest N that keeps the dropped mass
// negligible for mean photon numbers up to mu.
int suggested_levels(double mu);

} // namespace qjump::fock
