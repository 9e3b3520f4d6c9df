#pragma once

#include "qnode/adjoint.hpp"

namespace qnode {

// Clock-register weighting density over s in [0, T].
struct GFunction {
    enum class Kind { TopHat, RaisedCosine };
    Kind kind = Kind::TopHat;
    double taper = 0.0;  // cosine ramp width at each end, RaisedCosine only

    // Unnormalised shape; the register normalises on its grid.
    double shape(double s, double T) const;
};

// Discretised clock register: grid, quadrature weights, normalised density samples.
struct SRegister {
    std::vector<double> points;
    std::vector<double> weights;
    std::vector<double> g;  // sum_i weights[i] * g[i] = 1

    static SRegister midpoint(std::size_t n_points, double T, const GFunction& gf);
    static SRegister from_grid(const TimeGrid& grid, double T, const GFunction& gf);
};

// Block-diagonal state over the clock grid: block i is eta(s_i) with mixture
// weight w_i g(s_i).
struct HatEta {
    std::vector<ExtendedState> blocks;
    std::vector<double> block_weights;
    double trace() const;
};

// Requires a time-independent Hamiltonian (the clock dilation for
// time-dependent generators is out of scope).
HatEta build_hat_eta(const ParametricHamiltonian& h, std::span<const double> theta,
                     const SeedComponent& comp, const DensityMatrix& rho0, double T,
                     const SRegister& sreg);

// Single-expectation gradient: per m, 2 T sum_j c_j A_Tj tr((1_s (x) O_m) hat_eta_j).
// Finite shots sample the s-extended observable: a clock block is drawn from
// the mixture weights, then an eigenvalue of sigma_Y (x) dH/dtheta_m from that
// block's Born distribution.
GradientEstimate theorem3_gradient(const ParametricHamiltonian& h, std::span<const double> theta,
                                   const DensityMatrix& rho0, const AdjointSeed& seed, double T,
                                   const SRegister& sreg, const ShotBudget& shots,
                                   std::uint64_t master_seed);

struct BoundCheckResult {
    std::vector<double> lhs;  // per parameter
    std::vector<double> rhs;
    bool holds = false;
};

// Checks |(1/(2 T A_T)) dL/dtheta_m - tr((1_s (x) O_m) hat_eta_g)| against
// ||O_m||_inf * sum_i w_i |g_top(s_i) - g(s_i)| on an n-point midpoint grid;
// the reference gradient is the top-hat evaluation on the same grid. Single
// seed component only.
BoundCheckResult bound_check(const ParametricHamiltonian& h, std::span<const double> theta,
                             const DensityMatrix& rho0, const AdjointSeed& seed, double T,
                             const GFunction& g, std::size_t n_points);

// 1/2 L1 distance between two normalised densities sampled on the register.
double tv_distance(const std::vector<double>& g1, const std::vector<double>& g2,
                   const SRegister& sreg);

} // namespace qnode
