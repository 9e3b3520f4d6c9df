#include "doctest.h"

#include <cmath>

#include "qnode/losses.hpp"
#include "qnode/training.hpp"
#include "support/oracles.hpp"

using namespace qnode;

namespace {
double seed_err(const AdjointSeed& seed, const Mat& expect) {
    return (seed.delta_L_matrix(expect.rows()) - expect).cwiseAbs().maxCoeff();
}
} // namespace

TEST_CASE("state-prep loss and seed") {
    RngStream rng(41);
    DensityMatrix rhoT = DensityMatrix::from_pure(random_input_state(2, rng));
    DensityMatrix sigma = DensityMatrix::from_pure(random_input_state(2, rng));
    auto [loss, seed] = stateprep_loss_and_seed(rhoT, sigma);
    CHECK(loss == doctest::Approx(1.0 - (sigma.entries() * rhoT.entries()).trace().real()));
    CHECK(seed.components.size() == 1);
    CHECK(seed.components.front().c == 1.0);
    CHECK(seed.components.front().A_T == -1.0);
    // deltaL/deltaRho = -sigma.
    CHECK(seed_err(seed, -sigma.entries()) < 1e-12);
    // Each component's a_T is a unit-trace density matrix.
    CHECK(seed.components.front().a_T.trace().real() == doctest::Approx(1.0));
}

TEST_CASE("hamiltonian-learning seeds scale by the sample count") {
    RngStream rng(42);
    std::vector<DensityMatrix> evolved, targets;
    for (int i = 0; i < 4; ++i) {
        evolved.push_back(DensityMatrix::from_pure(random_input_state(1, rng)));
        targets.push_back(DensityMatrix::from_pure(random_input_state(1, rng)));
    }
    auto [loss, seeds] = hamlearn_loss_and_seeds(evolved, targets);
    double expect = 0.0;
    for (int i = 0; i < 4; ++i)
        expect += 1.0 - (targets[std::size_t(i)].entries() *
                         evolved[std::size_t(i)].entries()).trace().real();
    CHECK(loss == doctest::Approx(expect / 4.0));
    CHECK(seeds.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(seeds[i].components.front().c == doctest::Approx(0.25));
        CHECK(seed_err(seeds[i], -0.25 * targets[i].entries()) < 1e-12);
    }
}

TEST_CASE("observable seed reconstruction on exhaustive single-qubit paulis") {
    RngStream rng(43);
    DensityMatrix rhoT = DensityMatrix::from_pure(random_input_state(1, rng));
    for (const char* label : {"X", "Y", "Z"}) {
        ObservableRecord rec;
        rec.observable = PauliString::from_label(label);
        rec.value = 0.3;
        const double w = 0.5;
        auto [loss, seed] = observable_loss_and_seed({rec}, rhoT, w);
        const double pred = (rec.observable.dense() * rhoT.entries()).trace().real();
        CHECK(loss == doctest::Approx(w * (pred - 0.3) * (pred - 0.3)));
        // deltaL/deltaRho = 2 w (pred - value) O.
        CHECK(seed_err(seed, 2.0 * w * (pred - 0.3) * rec.observable.dense()) < 1e-10);
        for (const auto& comp : seed.components)
            CHECK(comp.a_T.trace().real() == doctest::Approx(1.0));
    }
}

TEST_CASE("observable seed reconstruction on random two-qubit instances") {
    RngStream rng(44);
    const char letters[] = {'I', 'X', 'Y', 'Z'};
    for (int rep = 0; rep < 100; ++rep) {
        std::string label;
        do {
            label = {letters[rng.below(4)], letters[rng.below(4)]};
        } while (label == "II");
        DensityMatrix rhoT = DensityMatrix::from_pure(random_input_state(2, rng));
        ObservableRecord rec;
        rec.observable = PauliString::from_label(label);
        rec.value = rng.uniform(-1.0, 1.0);
        const double w = rng.uniform(0.1, 2.0);
        auto [loss, seed] = observable_loss_and_seed({rec}, rhoT, w);
        const double pred = (rec.observable.dense() * rhoT.entries()).trace().real();
        CHECK(seed_err(seed, 2.0 * w * (pred - rec.value) * rec.observable.dense()) < 1e-10);
        CHECK(loss >= 0.0);
    }
}

TEST_CASE("observable loss gradient matches finite differences") {
    RngStream rng(45);
    BuiltinModel m = builtin_ising(2, rng);
    std::vector<double> theta = oracles::random_theta(m.hamiltonian.num_parameters(), rng);
    StateVector psi0 = random_input_state(2, rng);
    const double T = 1.2, w = 0.5;

    std::vector<ObservableRecord> records;
    for (const char* label : {"XI", "IZ", "YY"}) {
        ObservableRecord rec;
        rec.observable = PauliString::from_label(label);
        rec.value = rng.uniform(-0.5, 0.5);
        records.push_back(rec);
    }

    Mat rhoT = evolve_density(m.hamiltonian, theta, DensityMatrix::from_pure(psi0).entries(),
                              0.0, T);
    auto [loss, seed] = observable_loss_and_seed(records, DensityMatrix(rhoT, psi0.dims()), w);
    GradientEstimate est =
        theorem2_gradient(m.hamiltonian, theta, psi0, seed, T, TimeGrid::trapezoid(501, T),
                          ShotBudget::exact_budget(), 1);
    auto f = [&](const std::vector<double>& th) {
        return oracles::observable_loss(m.hamiltonian, th, DensityMatrix::from_pure(psi0),
                                        records, w, T);
    };
    std::vector<double> fd = oracles::fd_gradient(f, theta);
    for (std::size_t i = 0; i < fd.size(); ++i) CHECK(std::abs(est.values[i] - fd[i]) < 1e-5);
}

TEST_CASE("purity loss value and seed") {
    RngStream rng(46);
    // Entangle two qubits so the reduced state is genuinely mixed.
    Vec v = (kron(ket0(), ket0()) * std::sqrt(0.7) + kron(ket1(), ket1()) * std::sqrt(0.3));
    DensityMatrix R = DensityMatrix::from_pure(StateVector(v, {2, 2}));
    auto [loss, seed] = purity_loss_and_seed(R, 2);
    DensityMatrix red = partial_trace(R, {0});
    CHECK(loss == doctest::Approx(1.0 - red.purity()));
    // deltaL/deltaRho = -2 rho_red (x) 1.
    Mat expect = -2.0 * kron(red.entries(), Mat::Identity(2, 2));
    CHECK(seed_err(seed, expect) < 1e-12);
    CHECK(seed.components.front().A_T == doctest::Approx(-4.0));  // -2 d_e
}

TEST_CASE("purity loss gradient matches finite differences") {
    RngStream rng(47);
    BuiltinModel m = builtin_ising(2, rng);
    std::vector<double> theta = oracles::random_theta(m.hamiltonian.num_parameters(), rng);
    StateVector psi0 = random_input_state(2, rng);
    const double T = 1.0;

    Mat rhoT = evolve_density(m.hamiltonian, theta, DensityMatrix::from_pure(psi0).entries(),
                              0.0, T);
    auto [loss, seed] = purity_loss_and_seed(DensityMatrix(rhoT, psi0.dims()), 2);
    (void)loss;
    GradientEstimate est =
        theorem2_gradient(m.hamiltonian, theta, psi0, seed, T, TimeGrid::trapezoid(501, T),
                          ShotBudget::exact_budget(), 1);
    auto f = [&](const std::vector<double>& th) {
        return oracles::purity_loss(m.hamiltonian, th, DensityMatrix::from_pure(psi0), 2, T);
    };
    std::vector<double> fd = oracles::fd_gradient(f, theta);
    for (std::size_t i = 0; i < fd.size(); ++i) CHECK(std::abs(est.values[i] - fd[i]) < 1e-5);
}
