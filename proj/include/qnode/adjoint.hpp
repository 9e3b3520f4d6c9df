#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qnode/evolution.hpp"
#include "qnode/hamiltonian.hpp"

namespace qnode {

// One signed component of the terminal functional derivative:
// deltaL/deltaRho|_{rho(T)} = sum_j c_j * A_Tj * a_Tj with a_Tj a density matrix.
struct SeedComponent {
    double c = 1.0;
    double A_T = 1.0;
    Mat a_T;
    std::optional<Vec> a_pure;  // set when a_T = |a><a|

    static SeedComponent make_pure(double c, double A_T, Vec a);
    static SeedComponent make_mixed(double c, double A_T, Mat a);
};

struct AdjointSeed {
    std::vector<SeedComponent> components;
    Mat delta_L_matrix(Index d) const;
};

struct TimeGrid {
    enum class Rule { Trapezoid, Midpoint, UniformRandom };
    Rule rule = Rule::Trapezoid;
    std::vector<double> points;   // sorted, within [0, T]
    std::vector<double> weights;  // sum = T for deterministic rules

    static TimeGrid trapezoid(std::size_t n_points, double T);
    static TimeGrid midpoint(std::size_t n_points, double T);
    static TimeGrid uniform_random(std::size_t n_samples, double T, RngStream& rng);
    std::string describe() const;
};

struct ShotBudget {
    long shots = 0;  // 0 means exact expectations
    bool exact() const { return shots <= 0; }
    static ShotBudget exact_budget() { return {}; }
    static ShotBudget finite(long n) { return {n}; }
};

struct GradientEstimate {
    std::vector<double> values;
    std::vector<double> stderrs;  // zero when exact
    std::string grid_desc;
    long shots = 0;
    std::uint64_t seed = 0;
};

// Dense state on the ancilla (x) adjoint (x) original register, dimension 2d^2.
// Kept pure (length-2d^2 vector) whenever the inputs allow it.
class ExtendedState {
  public:
    static ExtendedState pure(Vec v, Index original_dim);
    static ExtendedState mixed(Mat m, Index original_dim);

    bool is_pure() const { return pure_.has_value(); }
    Index original_dim() const { return d_; }
    const Vec& vector() const;
    Mat matrix() const;  // materialises |v><v| for pure states
    double trace() const;
    double purity() const;

  private:
    std::optional<Vec> pure_;
    Mat mixed_;
    Index d_ = 0;
};

// eta(0) = |+><+| (x) a_T (x) rho0 (before the controlled swap).
ExtendedState build_eta0(const SeedComponent& comp, const DensityMatrix& rho0);

// eta(s) = C_swap (1 (x) U(T->s) (x) U(0->s)) eta0 (..)^t C_swap.
ExtendedState eta_at(const ExtendedState& eta0, const ParametricHamiltonian& h,
                     std::span<const double> theta, double s, double T,
                     const PropagatorConfig& cfg = {});

// Expectation of sigma_Y (x) H_k (x) 1 on eta. Exact budget traces directly;
// finite budget samples eigenvalues of sigma_Y (x) H_k from the Born
// distribution of tr_orig(eta). Returns (estimate, stderr).
std::pair<double, double> theorem2_expectation(const ExtendedState& eta,
                                               const ParametricHamiltonian& h, std::size_t k,
                                               const ShotBudget& shots, RngStream& rng);

// Born probabilities of measuring sigma_Y (x) obs on tr_orig(eta); outcome
// order is [+lambda_1, -lambda_1, ..., +lambda_d, -lambda_d] following the
// observable's spectrum.
std::vector<double> extended_born_distribution(const ExtendedState& eta,
                                               const HermitianObservable& obs);

enum class ExpectationPath {
    Auto,      // literal register for small dimensions, analytic otherwise
    Literal,   // always materialise the 2d^2 register
    Analytic,  // always evaluate -Im tr(H_k a(s) rho(s)) in factored form
};

struct GradientOptions {
    PropagatorConfig prop;
    ExpectationPath path = ExpectationPath::Auto;
};

// Extended-circuit estimator: per grid point and Hamiltonian term one
// expectation, recombined across parameters through the schedule derivatives.
GradientEstimate theorem2_gradient(const ParametricHamiltonian& h, std::span<const double> theta,
                                   const DensityMatrix& rho0, const AdjointSeed& seed, double T,
                                   const TimeGrid& grid, const ShotBudget& shots,
                                   std::uint64_t master_seed, const GradientOptions& opts = {});

GradientEstimate theorem2_gradient(const ParametricHamiltonian& h, std::span<const double> theta,
                                   const StateVector& psi0, const AdjointSeed& seed, double T,
                                   const TimeGrid& grid, const ShotBudget& shots,
                                   std::uint64_t master_seed, const GradientOptions& opts = {});

// Commutator-trace route: quadrature of i sum_j c_j A_Tj tr([dH/dtheta_m, a_j(s)] rho(s)).
// Exact expectations, dense states; the reference the estimator is checked against.
GradientEstimate adjoint_oracle_gradient(const ParametricHamiltonian& h,
                                         std::span<const double> theta, const DensityMatrix& rho0,
                                         const AdjointSeed& seed, double T, const TimeGrid& grid,
                                         const PropagatorConfig& cfg = {});

// Weighted recombination of per-component gradients, stderr in quadrature.
GradientEstimate combine_corollary1(const std::vector<GradientEstimate>& parts,
                                    const std::vector<double>& coefficients);

} // namespace qnode
