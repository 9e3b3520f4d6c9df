#include "doctest.h"

#include <cmath>

#include "qnode/adjoint.hpp"
#include "qnode/losses.hpp"
#include "qnode/training.hpp"
#include "support/oracles.hpp"

using namespace qnode;

namespace {

struct Instance {
    ParametricHamiltonian h;
    std::vector<double> theta;
    StateVector psi0;
    DensityMatrix sigma;
    double T = 1.0;
};

Instance random_stateprep(int sites, RngStream& rng) {
    ParametricHamiltonian ham =
        sites == 1 ? builtin_single_qubit() : builtin_ising(sites, rng).hamiltonian;
    BuiltinModel m{std::move(ham), {}};
    std::vector<double> theta = oracles::random_theta(m.hamiltonian.num_parameters(), rng);
    StateVector psi0 = random_input_state(sites, rng);
    DensityMatrix sigma = DensityMatrix::from_pure(random_input_state(sites, rng));
    return {m.hamiltonian, theta, psi0, sigma, rng.uniform(0.8, 1.5)};
}

AdjointSeed seed_of(const Instance& in) {
    Mat rhoT = evolve_density(in.h, in.theta, DensityMatrix::from_pure(in.psi0).entries(), 0.0,
                              in.T);
    return stateprep_loss_and_seed(DensityMatrix(rhoT, in.psi0.dims()), in.sigma).second;
}

} // namespace

TEST_CASE("time grids integrate to T and describe themselves") {
    TimeGrid tr = TimeGrid::trapezoid(11, 2.0);
    double sum = 0.0;
    for (double w : tr.weights) sum += w;
    CHECK(sum == doctest::Approx(2.0));
    CHECK(tr.points.front() == 0.0);
    CHECK(tr.points.back() == 2.0);
    CHECK(tr.describe().find("trapezoid") != std::string::npos);

    TimeGrid mid = TimeGrid::midpoint(10, 2.0);
    sum = 0.0;
    for (double w : mid.weights) sum += w;
    CHECK(sum == doctest::Approx(2.0));
    CHECK(mid.points.front() == doctest::Approx(0.1));

    RngStream rng(1);
    TimeGrid ur = TimeGrid::uniform_random(64, 2.0, rng);
    sum = 0.0;
    for (double w : ur.weights) sum += w;
    CHECK(sum == doctest::Approx(2.0));
    CHECK(std::is_sorted(ur.points.begin(), ur.points.end()));

    CHECK_THROWS(TimeGrid::trapezoid(1, 1.0));
}

TEST_CASE("extended register construction and evolution invariants") {
    RngStream rng(21);
    Instance in = random_stateprep(2, rng);
    AdjointSeed seed = seed_of(in);
    const SeedComponent& comp = seed.components.front();

    DensityMatrix rho0 = DensityMatrix::from_pure(in.psi0);
    ExtendedState eta0 = build_eta0(comp, rho0);
    CHECK(eta0.trace() == doctest::Approx(1.0));
    CHECK(eta0.is_pure());  // pure seed on a pure trajectory

    ExtendedState eta = eta_at(eta0, in.h, in.theta, 0.37, in.T);
    CHECK(eta.trace() == doctest::Approx(1.0));
    CHECK(eta.purity() == doctest::Approx(eta0.purity()));
}

TEST_CASE("born distribution is normalised and reproduces the exact expectation") {
    RngStream rng(22);
    Instance in = random_stateprep(1, rng);
    AdjointSeed seed = seed_of(in);
    ExtendedState eta =
        eta_at(build_eta0(seed.components.front(), DensityMatrix::from_pure(in.psi0)), in.h,
               in.theta, 0.5, in.T);

    const auto& term = in.h.terms().front();
    std::vector<double> probs = extended_born_distribution(eta, term.op);
    double total = 0.0;
    for (double p : probs) {
        CHECK(p >= -1e-12);
        total += p;
    }
    CHECK(total == doctest::Approx(1.0));

    // sum_j lambda_j (p+_j - p-_j) equals the exact trace expectation.
    const Spectrum& spec = term.op.spectrum();
    double mean = 0.0;
    for (Index j = 0; j < spec.eigenvalues.size(); ++j)
        mean += spec.eigenvalues(j) * (probs[2 * std::size_t(j)] - probs[2 * std::size_t(j) + 1]);
    RngStream tmp(0);
    auto [exact, se] = theorem2_expectation(eta, in.h, 0, ShotBudget::exact_budget(), tmp);
    CHECK(se == 0.0);
    CHECK(mean == doctest::Approx(exact).epsilon(1e-10));
}

TEST_CASE("literal and analytic expectation paths agree") {
    RngStream rng(23);
    for (int sites : {1, 2}) {
        Instance in = random_stateprep(sites, rng);
        AdjointSeed seed = seed_of(in);
        TimeGrid grid = TimeGrid::trapezoid(21, in.T);
        GradientOptions lit, ana;
        lit.path = ExpectationPath::Literal;
        ana.path = ExpectationPath::Analytic;
        GradientEstimate gl = theorem2_gradient(in.h, in.theta, in.psi0, seed, in.T, grid,
                                                ShotBudget::exact_budget(), 1, lit);
        GradientEstimate ga = theorem2_gradient(in.h, in.theta, in.psi0, seed, in.T, grid,
                                                ShotBudget::exact_budget(), 1, ana);
        for (std::size_t m = 0; m < gl.values.size(); ++m)
            CHECK(gl.values[m] == doctest::Approx(ga.values[m]).epsilon(1e-10));
    }
}

TEST_CASE("estimator, commutator-trace oracle, and finite differences agree") {
    RngStream rng(24);
    Instance in = random_stateprep(2, rng);
    AdjointSeed seed = seed_of(in);
    TimeGrid grid = TimeGrid::trapezoid(1001, in.T);

    GradientEstimate est = theorem2_gradient(in.h, in.theta, in.psi0, seed, in.T, grid,
                                             ShotBudget::exact_budget(), 1);
    GradientEstimate oracle = adjoint_oracle_gradient(in.h, in.theta,
                                                      DensityMatrix::from_pure(in.psi0), seed,
                                                      in.T, grid);
    auto loss = [&](const std::vector<double>& th) {
        return oracles::stateprep_loss(in.h, th, DensityMatrix::from_pure(in.psi0), in.sigma,
                                       in.T);
    };
    std::vector<double> fd = oracles::fd_gradient(loss, in.theta);
    for (std::size_t m = 0; m < est.values.size(); ++m) {
        CHECK(est.values[m] == doctest::Approx(oracle.values[m]).epsilon(1e-9));
        CHECK(std::abs(est.values[m] - fd[m]) < 1e-6);
    }
}

TEST_CASE("gradient is invariant under the c / A_T gauge") {
    RngStream rng(25);
    Instance in = random_stateprep(2, rng);
    AdjointSeed seed = seed_of(in);
    AdjointSeed scaled = seed;
    for (auto& comp : scaled.components) {
        comp.c *= 5.0;
        comp.A_T /= 5.0;
    }
    TimeGrid grid = TimeGrid::trapezoid(41, in.T);
    GradientEstimate a = theorem2_gradient(in.h, in.theta, in.psi0, seed, in.T, grid,
                                           ShotBudget::exact_budget(), 1);
    GradientEstimate b = theorem2_gradient(in.h, in.theta, in.psi0, scaled, in.T, grid,
                                           ShotBudget::exact_budget(), 1);
    for (std::size_t m = 0; m < a.values.size(); ++m)
        CHECK(a.values[m] == doctest::Approx(b.values[m]).epsilon(1e-12));
}

TEST_CASE("finite-shot estimates are reproducible and concentrate with shots") {
    RngStream rng(26);
    Instance in = random_stateprep(1, rng);
    AdjointSeed seed = seed_of(in);
    TimeGrid grid = TimeGrid::trapezoid(11, in.T);

    GradientEstimate exact = theorem2_gradient(in.h, in.theta, in.psi0, seed, in.T, grid,
                                               ShotBudget::exact_budget(), 7);
    GradientEstimate s1 = theorem2_gradient(in.h, in.theta, in.psi0, seed, in.T, grid,
                                            ShotBudget::finite(2000), 7);
    GradientEstimate s2 = theorem2_gradient(in.h, in.theta, in.psi0, seed, in.T, grid,
                                            ShotBudget::finite(2000), 7);
    CHECK(s1.values == s2.values);  // same master seed, identical draws

    GradientEstimate s3 = theorem2_gradient(in.h, in.theta, in.psi0, seed, in.T, grid,
                                            ShotBudget::finite(2000), 8);
    CHECK(s1.values != s3.values);

    for (std::size_t m = 0; m < exact.values.size(); ++m) {
        CHECK(s1.stderrs[m] > 0.0);
        // 5-sigma agreement with the exact value.
        CHECK(std::abs(s1.values[m] - exact.values[m]) < 5.0 * s1.stderrs[m] + 1e-12);
    }
}

TEST_CASE("mixed seeds and mixed trajectories take the dense path correctly") {
    RngStream rng(27);
    Instance in = random_stateprep(2, rng);
    // Mixed target: blend of two pure states.
    Mat blend = 0.6 * in.sigma.entries() +
                0.4 * DensityMatrix::from_pure(random_input_state(2, rng)).entries();
    DensityMatrix sigma(blend, in.sigma.dims());
    Mat rhoT = evolve_density(in.h, in.theta, DensityMatrix::from_pure(in.psi0).entries(), 0.0,
                              in.T);
    AdjointSeed seed = stateprep_loss_and_seed(DensityMatrix(rhoT, in.psi0.dims()), sigma).second;

    TimeGrid grid = TimeGrid::trapezoid(201, in.T);
    GradientEstimate est = theorem2_gradient(in.h, in.theta, in.psi0, seed, in.T, grid,
                                             ShotBudget::exact_budget(), 1);
    auto loss = [&](const std::vector<double>& th) {
        return oracles::stateprep_loss(in.h, th, DensityMatrix::from_pure(in.psi0), sigma, in.T);
    };
    std::vector<double> fd = oracles::fd_gradient(loss, in.theta);
    for (std::size_t m = 0; m < est.values.size(); ++m)
        CHECK(std::abs(est.values[m] - fd[m]) < 1e-5);
}

TEST_CASE("corollary recombination weights components") {
    GradientEstimate a, b;
    a.values = {1.0, 2.0};
    a.stderrs = {0.1, 0.2};
    b.values = {-1.0, 4.0};
    b.stderrs = {0.3, 0.0};
    GradientEstimate c = combine_corollary1({a, b}, {2.0, 0.5});
    CHECK(c.values[0] == doctest::Approx(1.5));
    CHECK(c.values[1] == doctest::Approx(6.0));
    CHECK(c.stderrs[0] == doctest::Approx(std::sqrt(0.04 + 0.0225)));
    CHECK(c.stderrs[1] == doctest::Approx(0.4));
}
