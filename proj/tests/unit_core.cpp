#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qnode/core.hpp"

using namespace qnode;

namespace {
double mat_err(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }
} // namespace

TEST_CASE("pauli algebra") {
    CHECK(mat_err(pauli_x() * pauli_y(), cplx(0, 1) * pauli_z()) < 1e-15);
    CHECK(mat_err(pauli_y() * pauli_z(), cplx(0, 1) * pauli_x()) < 1e-15);
    CHECK(mat_err(pauli_z() * pauli_x(), cplx(0, 1) * pauli_y()) < 1e-15);
    CHECK(mat_err(pauli_x() * pauli_x(), pauli_i()) < 1e-15);
}

TEST_CASE("pauli string dense and label round trip") {
    PauliString p = PauliString::from_label("XZ", 0.5);
    CHECK(p.label() == "XZ");
    CHECK(mat_err(p.dense(), 0.5 * kron(pauli_x(), pauli_z())) < 1e-15);
    CHECK_THROWS(PauliString::from_label("XQ"));
}

TEST_CASE("tensor ordering: left factor is the slow index") {
    // index = a * dim(B) + b, so Z (x) I acts on the left qubit.
    StateVector zero(ket0(), {2});
    StateVector one(ket1(), {2});
    StateVector s01 = tensor(zero, one);  // |01>
    Vec expect = Vec::Zero(4);
    expect(1) = 1.0;
    CHECK((s01.amplitudes() - expect).norm() < 1e-15);
    CHECK(s01.dims() == std::vector<Index>{2, 2});

    Mat zi = kron(pauli_z(), pauli_i());
    CHECK((zi * s01.amplitudes() - s01.amplitudes()).norm() < 1e-15);  // left qubit is |0>
    Mat iz = kron(pauli_i(), pauli_z());
    CHECK((iz * s01.amplitudes() + s01.amplitudes()).norm() < 1e-15);  // right qubit is |1>
}

TEST_CASE("partial trace recovers factors of a product state") {
    RngStream rng(5);
    StateVector a = random_input_state(1, rng);
    StateVector b = random_input_state(1, rng);
    DensityMatrix rho = tensor(DensityMatrix::from_pure(a), DensityMatrix::from_pure(b));
    DensityMatrix ra = partial_trace(rho, {0});
    DensityMatrix rb = partial_trace(rho, {1});
    CHECK(mat_err(ra.entries(), DensityMatrix::from_pure(a).entries()) < 1e-12);
    CHECK(mat_err(rb.entries(), DensityMatrix::from_pure(b).entries()) < 1e-12);
}

TEST_CASE("partial trace of a Bell state is maximally mixed") {
    Vec bell = (kron(ket0(), ket0()) + kron(ket1(), ket1())) / std::sqrt(2.0);
    DensityMatrix rho = DensityMatrix::from_pure(StateVector(bell, {2, 2}));
    DensityMatrix red = partial_trace(rho, {0});
    CHECK(mat_err(red.entries(), 0.5 * Mat::Identity(2, 2)) < 1e-12);
    CHECK_THROWS(partial_trace(rho, {}));
    CHECK_THROWS(partial_trace(rho, {2}));
}

TEST_CASE("expectation and fidelity") {
    DensityMatrix plus = DensityMatrix::from_pure(StateVector(ket_plus(), {2}));
    CHECK(expectation(HermitianObservable(pauli_x(), {2}), plus) == doctest::Approx(1.0));
    CHECK(expectation(HermitianObservable(pauli_z(), {2}), plus) == doctest::Approx(0.0));
    CHECK(fidelity_pure(StateVector(ket0(), {2}), StateVector(ket_plus(), {2})) ==
          doctest::Approx(0.5));
}

TEST_CASE("spectrum reconstructs the observable and the operator norm") {
    Mat m = 2.0 * pauli_z() + 0.3 * pauli_x();
    HermitianObservable o(m, {2});
    const Spectrum& s = o.spectrum();
    Mat rebuilt = s.eigenvectors * s.eigenvalues.cast<cplx>().asDiagonal() *
                  s.eigenvectors.adjoint();
    CHECK(mat_err(rebuilt, m) < 1e-12);
    CHECK(o.operator_norm() == doctest::Approx(std::sqrt(4.09)));
}

TEST_CASE("hermiticity is enforced") {
    Mat m(2, 2);
    m << cplx(0, 0), cplx(1, 0), cplx(0, 1), cplx(0, 0);  // not Hermitian
    CHECK_THROWS(HermitianObservable(m, {2}));
}

TEST_CASE("pauli decomposition into signed pure components") {
    // Sum of c_j rho_j must rebuild the string exactly; identity positions
    // split into unsigned |0>/|1> projector branches so every component is pure.
    for (const char* label : {"X", "Y", "Z", "XZ", "IY", "ZI", "XY", "ZZ", "XIY"}) {
        PauliString p = PauliString::from_label(label, 1.3);
        Mat rebuilt = Mat::Zero(p.dense().rows(), p.dense().cols());
        for (const auto& [c, rho] : pauli_decompose_to_pure(p)) {
            CHECK(rho.purity() == doctest::Approx(1.0));
            rebuilt += c * rho.entries();
        }
        CHECK(mat_err(rebuilt, p.dense()) < 1e-12);
    }
    CHECK_THROWS(pauli_decompose_to_pure(PauliString::from_label("II")));
}

TEST_CASE("controlled swap") {
    const Index d = 3;
    Mat cs = controlled_swap(d);
    CHECK(mat_err(cs * cs.adjoint(), Mat::Identity(2 * d * d, 2 * d * d)) < 1e-12);

    RngStream rng(11);
    Vec a(d), b(d);
    for (Index i = 0; i < d; ++i) {
        a(i) = cplx(rng.normal(), rng.normal());
        b(i) = cplx(rng.normal(), rng.normal());
    }
    // |0> branch untouched, |1> branch swaps the two registers.
    Vec v0 = kron(ket0(), kron(a, b));
    CHECK((cs * v0 - v0).norm() < 1e-12);
    Vec v1 = kron(ket1(), kron(a, b));
    CHECK((cs * v1 - kron(ket1(), kron(b, a))).norm() < 1e-12);

    // Matrix-free application agrees with the dense unitary.
    Vec w = v0 + v1;
    Vec w2 = w;
    apply_controlled_swap(w2, d);
    CHECK((w2 - cs * w).norm() < 1e-12);

    Mat m = w * w.adjoint();
    Mat m2 = m;
    apply_controlled_swap(m2, d);
    CHECK(mat_err(m2, cs * m * cs.adjoint()) < 1e-12);
}

TEST_CASE("random input states are normalised product states and reproducible") {
    RngStream r1(42), r2(42);
    StateVector s1 = random_input_state(3, r1);
    StateVector s2 = random_input_state(3, r2);
    CHECK(s1.amplitudes().norm() == doctest::Approx(1.0));
    CHECK((s1.amplitudes() - s2.amplitudes()).norm() == 0.0);
    CHECK(s1.dims() == std::vector<Index>{2, 2, 2});

    // Product state: reduced single-qubit states stay pure.
    DensityMatrix rho = DensityMatrix::from_pure(s1);
    for (std::size_t q = 0; q < 3; ++q)
        CHECK(partial_trace(rho, {q}).purity() == doctest::Approx(1.0));
}
