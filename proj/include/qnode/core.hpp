#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qnode/rng.hpp"

namespace qnode {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;
using Index = Eigen::Index;

constexpr double kHermTol = 1e-10;
constexpr double kTraceTol = 1e-10;
constexpr double kPsdTol = -1e-9;

// ---------------------------------------------------------------------------
// States and observables on multi-subsystem registers.
//
// Subsystem ordering convention (used by every module): the leftmost factor
// in `dims` is the slowest-varying index of the flattened register, i.e.
// tensor(A, B) has A on the left and index = a * dim(B) + b.
// ---------------------------------------------------------------------------

class StateVector {
  public:
    StateVector(Vec amplitudes, std::vector<Index> dims);

    const Vec& amplitudes() const { return amp_; }
    const std::vector<Index>& dims() const { return dims_; }
    Index dim() const { return amp_.size(); }

  private:
    Vec amp_;
    std::vector<Index> dims_;
};

class DensityMatrix {
  public:
    DensityMatrix(Mat entries, std::vector<Index> dims);

    static DensityMatrix from_pure(const StateVector& psi);

    const Mat& entries() const { return m_; }
    const std::vector<Index>& dims() const { return dims_; }
    Index dim() const { return m_.rows(); }
    double purity() const { return (m_ * m_).trace().real(); }

  private:
    Mat m_;
    std::vector<Index> dims_;
};

struct Spectrum {
    RealVec eigenvalues;
    Mat eigenvectors; // columns
};

class HermitianObservable {
  public:
    HermitianObservable(Mat entries, std::vector<Index> dims);

    const Mat& entries() const { return m_; }
    const std::vector<Index>& dims() const { return dims_; }
    Index dim() const { return m_.rows(); }

    // Eagerly computes and caches the spectral decomposition.
    const Spectrum& spectrum() const;
    double operator_norm() const;

  private:
    Mat m_;
    std::vector<Index> dims_;
    mutable std::optional<Spectrum> spec_;
};

enum class PauliLetter { I, X, Y, Z };

struct PauliString {
    std::vector<PauliLetter> letters;
    double coefficient = 1.0;

    Index qubits() const { return static_cast<Index>(letters.size()); }
    Mat dense() const;
    std::string label() const;
    static PauliString from_label(const std::string& label, double coefficient = 1.0);
};

// Single-qubit constants.
Mat pauli_i();
Mat pauli_x();
Mat pauli_y();
Mat pauli_z();
Vec ket0();
Vec ket1();
Vec ket_plus();
Vec ket_minus();

// Kronecker product with no dims bookkeeping.
Mat kron(const Mat& a, const Mat& b);
Vec kron(const Vec& a, const Vec& b);

// Tensor products that concatenate dims.
StateVector tensor(const StateVector& a, const StateVector& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
HermitianObservable tensor(const HermitianObservable& a, const HermitianObservable& b);

// Reduced density matrix on the subsystems listed in `keep` (ascending order
// in the output). Throws on an empty keep set or out-of-range index.
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::size_t>& keep);

// tr(O rho); the imaginary part must be below 1e-9 and is discarded.
double expectation(const HermitianObservable& o, const DensityMatrix& rho);
double expectation(const Mat& o, const Mat& rho);

// |<psi|phi>|^2.
double fidelity_pure(const StateVector& psi, const StateVector& phi);

// Decomposition of a Pauli string into signed pure-state density matrices:
// p = sum_j c_j rho_j where each rho_j is a product of eigenprojectors on the
// non-identity positions and maximally mixed factors on identity positions
// (whose dimension is folded into c_j). 2^w terms for w non-identity letters.
// Throws for the all-identity string.
std::vector<std::pair<double, DensityMatrix>> pauli_decompose_to_pure(const PauliString& p);

// C_swap = |0><0| (x) 1 (x) 1 + |1><1| (x) S on dimension 2*d*d.
Mat controlled_swap(Index d);

// Applies C_swap in place to a vector / matrix on ancilla (x) d (x) d
// without materialising the unitary.
void apply_controlled_swap(Vec& v, Index d);
void apply_controlled_swap(Mat& m, Index d);

// Random product state RZ(a) RY(b) RX(c) |+> per qubit, angles ~ U(0, 4pi).
StateVector random_input_state(int qubits, RngStream& rng);

} // namespace qnode
