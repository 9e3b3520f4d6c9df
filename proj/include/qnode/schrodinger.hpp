#pragma once

#include "qnode/adjoint.hpp"
#include "qnode/hamiltonian.hpp"

namespace qnode {

// Linear (generally non-unitary) system du/dt = -i A(t, theta) u with
// A(t, theta) = sum_k c_k(t, theta) A_k.
struct LinearTerm {
    Mat A;  // square, possibly non-Hermitian
    Schedule schedule;
};

struct LinearSystem {
    std::vector<LinearTerm> terms;
    std::size_t num_parameters = 0;

    Index dim() const { return terms.front().A.rows(); }
    Mat dense(double t, std::span<const double> theta) const;
};

// Discretised xi-register: periodic grid on [-L, L), spectral conjugate
// momentum, and the positive-half projector diagonal.
struct XiRegister {
    std::size_t n = 0;
    double L = 0.0;
    std::vector<double> xi;
    Mat eta_hat;               // Hermitian, Fourier spectral derivative
    std::vector<bool> positive;  // xi_i > 0 indicator

    static XiRegister make(std::size_t n = 512, double L = 16.0);
};

// A = A1 - i A2 with both parts Hermitian.
std::pair<Mat, Mat> hermitian_split(const Mat& a);

// Hermitian dilation on system (x) xi: per term, A1_k (x) 1 + A2_k (x) eta_hat
// sharing the term's schedule, so parameter derivatives route unchanged.
ParametricHamiltonian dilate(const LinearSystem& sys, const XiRegister& xi);

// Samples of e^{-|xi|} on the grid, unit norm.
Vec xi_initial(const XiRegister& xi);

// Full dilated initial state u0 (x) |Xi>, normalised.
StateVector dilated_initial(const Vec& u0, const XiRegister& xi);

// Projects onto xi > 0 and traces out the register. Returns the normalised
// reduced state and the projection weight.
std::pair<DensityMatrix, double> recover(const StateVector& v, const XiRegister& xi);

struct CollocationRecord {
    Mat observable;  // PSD on the system space
    double value = 0.0;
};

// Collocation loss L = (1/N) sum_j |value_j - tr(O_j rho(T))|^2 on the
// recovered state, with the seed expressed on the full dilated space.
std::pair<double, AdjointSeed> ode_loss_and_seed(const std::vector<CollocationRecord>& records,
                                                 const StateVector& v_T, const XiRegister& xi);

// Classical reference solve of du/dt = -i A(t, theta) u.
Vec classical_solve(const LinearSystem& sys, std::span<const double> theta, const Vec& u0,
                    double T, long steps = 1000);

// Built-in decay model: two components, d(u_0)/dt = -theta u_0 with a
// conserved reference component so the normalised collocation data is
// informative about theta.
LinearSystem builtin_decay();

// Collocation records for the decay model at rate a_star (basis projectors,
// normalised intensities from the classical solution).
std::vector<CollocationRecord> decay_records(double a_star, const Vec& u0, double T);

} // namespace qnode
