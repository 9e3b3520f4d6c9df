#include "doctest.h"

#include <cmath>

#include "qnode/evolution.hpp"
#include "qnode/training.hpp"
#include "support/oracles.hpp"

using namespace qnode;

namespace {

ParametricHamiltonian x_rotation() {
    Schedule c;
    c.kind = Schedule::Kind::Constant;
    c.theta_index = 0;
    return ParametricHamiltonian({{HermitianObservable(pauli_x(), {2}), c, "X"}}, 1);
}

} // namespace

TEST_CASE("closed-form single-qubit rotation") {
    // exp(-i t X) = cos(t) I - i sin(t) X.
    ParametricHamiltonian h = x_rotation();
    std::vector<double> theta{1.0};
    const double t = 0.7;
    Mat u = propagator(h, theta, 0.0, t);
    Mat expect = std::cos(t) * pauli_i() - cplx(0, 1) * std::sin(t) * pauli_x();
    CHECK((u - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("propagator is unitary and reversing the interval gives the adjoint") {
    RngStream rng(2);
    BuiltinModel m = builtin_td_ising(2, 2, rng);
    std::vector<double> theta = oracles::random_theta(m.hamiltonian.num_parameters(), rng);
    Mat u = propagator(m.hamiltonian, theta, 0.2, 1.1);
    CHECK((u * u.adjoint() - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-9);
    Mat ub = propagator(m.hamiltonian, theta, 1.1, 0.2);
    CHECK((ub - u.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("time-ordered composition") {
    RngStream rng(6);
    BuiltinModel m = builtin_td_ising(2, 2, rng);
    std::vector<double> theta = oracles::random_theta(m.hamiltonian.num_parameters(), rng);
    PropagatorConfig fine{PropagatorMethod::Exact, 1e-4};
    Mat whole = propagator(m.hamiltonian, theta, 0.0, 1.0, fine);
    Mat split = propagator(m.hamiltonian, theta, 0.4, 1.0, fine) *
                propagator(m.hamiltonian, theta, 0.0, 0.4, fine);
    CHECK((whole - split).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("trotter splitting converges to the exact propagator") {
    RngStream rng(8);
    BuiltinModel m = builtin_ising(2, rng);
    std::vector<double> theta = oracles::random_theta(m.hamiltonian.num_parameters(), rng);
    // Add a non-commuting transverse term so the splitting is nontrivial.
    std::vector<HamiltonianTerm> terms = m.hamiltonian.terms();
    Schedule fx;
    fx.kind = Schedule::Kind::Fixed;
    fx.fixed_value = 0.9;
    terms.push_back({HermitianObservable(kron(pauli_x(), pauli_i()), {2, 2}), fx, "X1"});
    ParametricHamiltonian h(terms, m.hamiltonian.num_parameters());

    Mat exact = propagator(h, theta, 0.0, 1.0);
    double prev_err = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double dtau = i == 0 ? 0.02 : 0.01;
        Mat tr = propagator(h, theta, 0.0, 1.0, {PropagatorMethod::Trotter1, dtau});
        const double err = (tr - exact).cwiseAbs().maxCoeff();
        if (i == 0)
            prev_err = err;
        else
            CHECK(err < 0.6 * prev_err);  // first order: halving dtau halves the error
        CHECK(err < 0.05);
    }
}

TEST_CASE("evolve_density preserves trace, hermiticity, and purity") {
    RngStream rng(12);
    BuiltinModel m = builtin_td_ising(2, 2, rng);
    std::vector<double> theta = oracles::random_theta(m.hamiltonian.num_parameters(), rng);
    StateVector psi = random_input_state(2, rng);
    Mat rho = DensityMatrix::from_pure(psi).entries();
    Mat out = evolve_density(m.hamiltonian, theta, rho, 0.0, 1.3);
    CHECK(out.trace().real() == doctest::Approx(1.0));
    CHECK((out - out.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((out * out).trace().real() == doctest::Approx(1.0));
}

TEST_CASE("spectral propagator matches the generic path") {
    ParametricHamiltonian h = builtin_hydrogen();
    SpectralPropagator sp(h.dense(0.0, {}));
    Mat direct = propagator(h, {}, 0.0, 0.9);
    CHECK((sp.at(0.9) - direct).cwiseAbs().maxCoeff() < 1e-10);

    RngStream rng(3);
    StateVector psi = random_input_state(2, rng);
    Vec v = psi.amplitudes();
    sp.apply(v, 0.9);
    CHECK((v - direct * psi.amplitudes()).norm() < 1e-10);
}

TEST_CASE("fast evolver agrees with evolve_state on every branch") {
    RngStream rng(14);

    // Single-term time-independent.
    ParametricHamiltonian hx = x_rotation();
    std::vector<double> tx{0.8};
    StateVector p1 = random_input_state(1, rng);
    Vec v = p1.amplitudes();
    FastEvolver(hx, tx).apply(v, 0.1, 0.9);
    CHECK((v - evolve_state(hx, tx, p1.amplitudes(), 0.1, 0.9)).norm() < 1e-11);

    // Multi-term time-independent.
    ParametricHamiltonian hh = builtin_hydrogen();
    StateVector p2 = random_input_state(2, rng);
    v = p2.amplitudes();
    FastEvolver(hh, {}).apply(v, 0.0, 1.2);
    CHECK((v - evolve_state(hh, {}, p2.amplitudes(), 0.0, 1.2)).norm() < 1e-11);

    // Time-dependent fallback.
    BuiltinModel td = builtin_td_ising(2, 2, rng);
    std::vector<double> theta = oracles::random_theta(td.hamiltonian.num_parameters(), rng);
    v = p2.amplitudes();
    FastEvolver(td.hamiltonian, theta).apply(v, 0.0, 1.0);
    CHECK((v - evolve_state(td.hamiltonian, theta, p2.amplitudes(), 0.0, 1.0)).norm() < 1e-11);

    // Backward intervals too.
    v = p2.amplitudes();
    FastEvolver(hh, {}).apply(v, 1.2, 0.3);
    CHECK((v - evolve_state(hh, {}, p2.amplitudes(), 1.2, 0.3)).norm() < 1e-11);
}
