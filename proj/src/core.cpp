#include "qnode/core.hpp"

#include <Eigen/Eigenvalues>
#include <numeric>
#include <stdexcept>

namespace qnode {

namespace {

Index dims_product(const std::vector<Index>& dims) {
    Index p = 1;
    for (Index d : dims) p *= d;
    return p;
}

void check_dims_match(Index n, const std::vector<Index>& dims, const char* what) {
    if (dims.empty() || dims_product(dims) != n)
        throw std::invalid_argument(std::string(what) + ": dims do not factor the dimension");
}

} // namespace

StateVector::StateVector(Vec amplitudes, std::vector<Index> dims)
    : amp_(std::move(amplitudes)), dims_(std::move(dims)) {
    check_dims_match(amp_.size(), dims_, "StateVector");
    if (std::abs(amp_.norm() - 1.0) > 1e-10)
        throw std::invalid_argument("StateVector: norm differs from 1 beyond 1e-10");
}

DensityMatrix::DensityMatrix(Mat entries, std::vector<Index> dims)
    : m_(std::move(entries)), dims_(std::move(dims)) {
    if (m_.rows() != m_.cols()) throw std::invalid_argument("DensityMatrix: not square");
    check_dims_match(m_.rows(), dims_, "DensityMatrix");
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kHermTol)
        throw std::invalid_argument("DensityMatrix: not Hermitian within 1e-10");
    if (std::abs(m_.trace().real() - 1.0) > kTraceTol || std::abs(m_.trace().imag()) > kTraceTol)
        throw std::invalid_argument("DensityMatrix: trace differs from 1 beyond 1e-10");
    Eigen::SelfAdjointEigenSolver<Mat> es(m_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < kPsdTol)
        throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond -1e-9");
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
    return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint(), psi.dims());
}

HermitianObservable::HermitianObservable(Mat entries, std::vector<Index> dims)
    : m_(std::move(entries)), dims_(std::move(dims)) {
    if (m_.rows() != m_.cols()) throw std::invalid_argument("HermitianObservable: not square");
    check_dims_match(m_.rows(), dims_, "HermitianObservable");
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kHermTol)
        throw std::invalid_argument("HermitianObservable: not Hermitian within 1e-10");
}

const Spectrum& HermitianObservable::spectrum() const {
    if (!spec_) {
        Eigen::SelfAdjointEigenSolver<Mat> es(m_);
        spec_ = Spectrum{es.eigenvalues(), es.eigenvectors()};
    }
    return *spec_;
}

double HermitianObservable::operator_norm() const {
    return spectrum().eigenvalues.cwiseAbs().maxCoeff();
}

Mat pauli_i() { return Mat::Identity(2, 2); }

Mat pauli_x() {
    Mat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Mat pauli_y() {
    Mat m(2, 2);
    m << 0, cplx(0, -1), cplx(0, 1), 0;
    return m;
}

Mat pauli_z() {
    Mat m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

Vec ket0() {
    Vec v(2);
    v << 1, 0;
    return v;
}

Vec ket1() {
    Vec v(2);
    v << 0, 1;
    return v;
}

Vec ket_plus() {
    Vec v(2);
    v << 1, 1;
    return v / std::sqrt(2.0);
}

Vec ket_minus() {
    Vec v(2);
    v << 1, -1;
    return v / std::sqrt(2.0);
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Vec kron(const Vec& a, const Vec& b) {
    Vec out(a.size() * b.size());
    for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

StateVector tensor(const StateVector& a, const StateVector& b) {
    std::vector<Index> dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    return StateVector(kron(a.amplitudes(), b.amplitudes()), std::move(dims));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    std::vector<Index> dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    return DensityMatrix(kron(a.entries(), b.entries()), std::move(dims));
}

HermitianObservable tensor(const HermitianObservable& a, const HermitianObservable& b) {
    std::vector<Index> dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    return HermitianObservable(kron(a.entries(), b.entries()), std::move(dims));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::size_t>& keep) {
    const auto& dims = rho.dims();
    const std::size_t n = dims.size();
    if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");
    std::vector<bool> kept(n, false);
    for (std::size_t s : keep) {
        if (s >= n) throw std::invalid_argument("partial_trace: subsystem index out of range");
        kept[s] = true;
    }

    std::vector<Index> keep_dims, trace_dims;
    std::vector<std::size_t> keep_idx, trace_idx;
    for (std::size_t s = 0; s < n; ++s) {
        if (kept[s]) {
            keep_dims.push_back(dims[s]);
            keep_idx.push_back(s);
        } else {
            trace_dims.push_back(dims[s]);
            trace_idx.push_back(s);
        }
    }
    const Index dk = dims_product(keep_dims);
    const Index dt = trace_dims.empty() ? 1 : dims_product(trace_dims);

    // Strides of each subsystem in the flattened index (leftmost slowest).
    std::vector<Index> stride(n, 1);
    for (std::size_t s = n - 1; s-- > 0;) stride[s] = stride[s + 1] * dims[s + 1];

    auto flat_index = [&](const std::vector<std::size_t>& subsys, const std::vector<Index>& sdims,
                          Index packed) {
        Index flat = 0;
        for (std::size_t q = sdims.size(); q-- > 0;) {
            flat += (packed % sdims[q]) * stride[subsys[q]];
            packed /= sdims[q];
        }
        return flat;
    };

    Mat out = Mat::Zero(dk, dt > 0 ? dk : dk);
    for (Index a = 0; a < dk; ++a) {
        const Index fa = flat_index(keep_idx, keep_dims, a);
        for (Index b = 0; b < dk; ++b) {
            const Index fb = flat_index(keep_idx, keep_dims, b);
            cplx acc = 0;
            for (Index t = 0; t < dt; ++t) {
                const Index ft = flat_index(trace_idx, trace_dims, t);
                acc += rho.entries()(fa + ft, fb + ft);
            }
            out(a, b) = acc;
        }
    }
    return DensityMatrix(std::move(out), std::move(keep_dims));
}

double expectation(const Mat& o, const Mat& rho) {
    if (o.rows() != rho.rows()) throw std::invalid_argument("expectation: dimension mismatch");
    const cplx tr = (o * rho).trace();
    if (std::abs(tr.imag()) > 1e-9)
        throw std::runtime_error("expectation: imaginary part above 1e-9");
    return tr.real();
}

double expectation(const HermitianObservable& o, const DensityMatrix& rho) {
    if (o.dims() != rho.dims() && o.dim() != rho.dim())
        throw std::invalid_argument("expectation: dimension mismatch");
    return expectation(o.entries(), rho.entries());
}

double fidelity_pure(const StateVector& psi, const StateVector& phi) {
    if (psi.dim() != phi.dim()) throw std::invalid_argument("fidelity_pure: dimension mismatch");
    return std::norm(psi.amplitudes().dot(phi.amplitudes()));
}

Mat PauliString::dense() const {
    Mat out = Mat::Identity(1, 1);
    for (PauliLetter l : letters) {
        switch (l) {
            case PauliLetter::I: out = kron(out, pauli_i()); break;
            case PauliLetter::X: out = kron(out, pauli_x()); break;
            case PauliLetter::Y: out = kron(out, pauli_y()); break;
            case PauliLetter::Z: out = kron(out, pauli_z()); break;
        }
    }
    return coefficient * out;
}

std::string PauliString::label() const {
    std::string s;
    for (PauliLetter l : letters) {
        switch (l) {
            case PauliLetter::I: s += 'I'; break;
            case PauliLetter::X: s += 'X'; break;
            case PauliLetter::Y: s += 'Y'; break;
            case PauliLetter::Z: s += 'Z'; break;
        }
    }
    return s;
}

PauliString PauliString::from_label(const std::string& label, double coefficient) {
    PauliString p;
    p.coefficient = coefficient;
    for (char c : label) {
        switch (c) {
            case 'I': p.letters.push_back(PauliLetter::I); break;
            case 'X': p.letters.push_back(PauliLetter::X); break;
            case 'Y': p.letters.push_back(PauliLetter::Y); break;
            case 'Z': p.letters.push_back(PauliLetter::Z); break;
            default: throw std::invalid_argument("PauliString: bad letter in label");
        }
    }
    if (p.letters.empty()) throw std::invalid_argument("PauliString: empty label");
    return p;
}

namespace {

// Signed eigenprojector pairs: P = proj(+) - proj(-).
std::pair<Vec, Vec> pauli_eigvecs(PauliLetter l) {
    switch (l) {
        case PauliLetter::X: return {ket_plus(), ket_minus()};
        case PauliLetter::Y: {
            // sigma_Y = |psi1><psi1| - |psi2><psi2|, psi_{1,2} = (|1> -/+ i|0>)/sqrt(2)
            Vec p1(2), p2(2);
            p1 << cplx(0, -1) / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
            p2 << cplx(0, 1) / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
            return {p1, p2};
        }
        case PauliLetter::Z: return {ket0(), ket1()};
        default: throw std::logic_error("pauli_eigvecs: identity has no signed pair");
    }
}

} // namespace

std::vector<std::pair<double, DensityMatrix>> pauli_decompose_to_pure(const PauliString& p) {
    std::vector<std::size_t> active;
    for (std::size_t q = 0; q < p.letters.size(); ++q)
        if (p.letters[q] != PauliLetter::I) active.push_back(q);
    if (active.empty())
        throw std::invalid_argument("pauli_decompose_to_pure: all-identity string");

    // Every factor splits into a pure projector pair: signed eigenvectors on
    // active letters, |0>/|1> (both sign +, I = |0><0| + |1><1|) on identities,
    // so each component is a pure product state.
    const std::size_t n = p.letters.size();
    std::vector<std::pair<double, DensityMatrix>> out;
    out.reserve(std::size_t(1) << n);

    for (std::size_t bits = 0; bits < (std::size_t(1) << n); ++bits) {
        double sign = 1.0;
        Mat state = Mat::Identity(1, 1);
        for (std::size_t q = 0; q < n; ++q) {
            const bool pick_second = (bits >> q) & 1;
            if (p.letters[q] == PauliLetter::I) {
                const Vec v = pick_second ? ket1() : ket0();
                state = kron(state, Mat(v * v.adjoint()));
                continue;
            }
            auto [plus, minus] = pauli_eigvecs(p.letters[q]);
            const Vec& v = pick_second ? minus : plus;
            if (pick_second) sign = -sign;
            state = kron(state, Mat(v * v.adjoint()));
        }
        std::vector<Index> dims(n, 2);
        out.emplace_back(sign * p.coefficient, DensityMatrix(std::move(state), std::move(dims)));
    }
    return out;
}

Mat controlled_swap(Index d) {
    if (d < 1) throw std::invalid_argument("controlled_swap: d must be >= 1");
    const Index dd = d * d;
    Mat out = Mat::Zero(2 * dd, 2 * dd);
    out.block(0, 0, dd, dd) = Mat::Identity(dd, dd);
    for (Index a = 0; a < d; ++a)
        for (Index b = 0; b < d; ++b) out(dd + b * d + a, dd + a * d + b) = 1.0;
    return out;
}

void apply_controlled_swap(Vec& v, Index d) {
    const Index dd = d * d;
    if (v.size() != 2 * dd) throw std::invalid_argument("apply_controlled_swap: bad size");
    for (Index a = 0; a < d; ++a)
        for (Index b = a + 1; b < d; ++b) std::swap(v(dd + a * d + b), v(dd + b * d + a));
}

void apply_controlled_swap(Mat& m, Index d) {
    const Index dd = d * d;
    if (m.rows() != 2 * dd) throw std::invalid_argument("apply_controlled_swap: bad size");
    auto perm = [&](Index i) {
        if (i < dd) return i;
        const Index a = (i - dd) / d, b = (i - dd) % d;
        return dd + b * d + a;
    };
    Mat out(m.rows(), m.cols());
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) out(perm(i), perm(j)) = m(i, j);
    m = std::move(out);
}

namespace {

Mat rotation(const Mat& generator, double angle) {
    // exp(-i angle/2 sigma) = cos(angle/2) I - i sin(angle/2) sigma for Pauli sigma.
    return std::cos(angle / 2) * Mat::Identity(2, 2) -
           cplx(0, 1) * std::sin(angle / 2) * generator;
}

} // namespace

StateVector random_input_state(int qubits, RngStream& rng) {
    if (qubits < 1) throw std::invalid_argument("random_input_state: need >= 1 qubit");
    Vec out = Vec::Ones(1);
    for (int q = 0; q < qubits; ++q) {
        const double alpha = rng.uniform(0.0, 4.0 * M_PI);
        const double beta = rng.uniform(0.0, 4.0 * M_PI);
        const double gamma = rng.uniform(0.0, 4.0 * M_PI);
        Vec v = rotation(pauli_z(), alpha) * rotation(pauli_y(), beta) *
                rotation(pauli_x(), gamma) * ket_plus();
        out = kron(out, v);
    }
    out /= out.norm();
    return StateVector(std::move(out), std::vector<Index>(qubits, 2));
}

} // namespace qnode
