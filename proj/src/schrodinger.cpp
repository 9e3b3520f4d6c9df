#include "qnode/schrodinger.hpp"

#include <cmath>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

namespace qnode {

Mat LinearSystem::dense(double t, std::span<const double> theta) const {
    Mat a = Mat::Zero(dim(), dim());
    for (const auto& term : terms) a += term.schedule.value(t, theta) * term.A;
    return a;
}

XiRegister XiRegister::make(std::size_t n, double L) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("XiRegister: n must be even, >= 2");
    XiRegister xi;
    xi.n = n;
    xi.L = L;
    const double dx = 2.0 * L / double(n);
    for (std::size_t i = 0; i < n; ++i) xi.xi.push_back(-L + double(i) * dx);

    // eta_hat = i d/dxi on the periodic grid: Fourier mode k has symbol -k,
    // the sign that transports the e^{-|xi|} profile leftward so decay shows
    // up as loss of weight on xi > 0.
    std::vector<double> k(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double m = double(j) < double(n) / 2.0 ? double(j) : double(j) - double(n);
        k[j] = M_PI / L * m;
    }
    Mat eta = Mat::Zero(n, n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            cplx acc = 0;
            for (std::size_t j = 0; j < n; ++j)
                acc += -k[j] * std::exp(cplx(0, k[j] * (xi.xi[a] - xi.xi[b])));
            eta(a, b) = acc / double(n);
        }
    xi.eta_hat = 0.5 * (eta + eta.adjoint());

    for (std::size_t i = 0; i < n; ++i) xi.positive.push_back(xi.xi[i] > 0.0);
    return xi;
}

std::pair<Mat, Mat> hermitian_split(const Mat& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("hermitian_split: not square");
    Mat a1 = 0.5 * (a + a.adjoint());
    Mat a2 = cplx(0, 0.5) * (a - a.adjoint());
    return {std::move(a1), std::move(a2)};
}

ParametricHamiltonian dilate(const LinearSystem& sys, const XiRegister& xi) {
    const Index d = sys.dim();
    const Index nx = Index(xi.n);
    std::vector<HamiltonianTerm> terms;
    const std::vector<Index> dims{d, nx};
    for (const auto& term : sys.terms) {
        auto [a1, a2] = hermitian_split(term.A);
        if (a1.cwiseAbs().maxCoeff() > 0.0)
            terms.push_back({HermitianObservable(kron(a1, Mat::Identity(nx, nx)), dims),
                             term.schedule, "A1"});
        if (a2.cwiseAbs().maxCoeff() > 0.0)
            terms.push_back({HermitianObservable(kron(a2, xi.eta_hat), dims), term.schedule,
                             "A2*eta"});
    }
    if (terms.empty()) throw std::invalid_argument("dilate: system has no nonzero terms");
    return ParametricHamiltonian(std::move(terms), sys.num_parameters);
}

Vec xi_initial(const XiRegister& xi) {
    Vec v(Index(xi.n));
    for (std::size_t i = 0; i < xi.n; ++i) v(Index(i)) = std::exp(-std::abs(xi.xi[i]));
    return v / v.norm();
}

StateVector dilated_initial(const Vec& u0, const XiRegister& xi) {
    Vec v = kron(Vec(u0 / u0.norm()), xi_initial(xi));
    return StateVector(std::move(v), {u0.size(), Index(xi.n)});
}

std::pair<DensityMatrix, double> recover(const StateVector& v, const XiRegister& xi) {
    const Index nx = Index(xi.n);
    const Index d = v.dim() / nx;
    if (d * nx != v.dim()) throw std::invalid_argument("recover: dimension mismatch");
    Mat rho = Mat::Zero(d, d);
    for (Index i = 0; i < nx; ++i) {
        if (!xi.positive[std::size_t(i)]) continue;
        for (Index a = 0; a < d; ++a)
            for (Index b = 0; b < d; ++b)
                rho(a, b) += v.amplitudes()(a * nx + i) * std::conj(v.amplitudes()(b * nx + i));
    }
    double weight = rho.trace().real();
    if (weight < 1e-12) throw std::runtime_error("recover: projection annihilates the state");
    rho /= weight;
    rho = 0.5 * (rho + rho.adjoint());
    return {DensityMatrix(std::move(rho), {d}), weight};
}

std::pair<double, AdjointSeed> ode_loss_and_seed(const std::vector<CollocationRecord>& records,
                                                 const StateVector& v_T, const XiRegister& xi) {
    if (records.empty()) throw std::invalid_argument("ode_loss_and_seed: no records");
    const auto [rho, weight] = recover(v_T, xi);
    const Index d = rho.dim();
    const Index nx = Index(xi.n);

    Mat pi = Mat::Zero(nx, nx);
    double n_pos = 0.0;
    for (Index i = 0; i < nx; ++i)
        if (xi.positive[std::size_t(i)]) {
            pi(i, i) = 1.0;
            n_pos += 1.0;
        }

    const double n_rec = double(records.size());
    double loss = 0.0;
    AdjointSeed seed;
    for (const CollocationRecord& rec : records) {
        if (rec.observable.rows() != d)
            throw std::invalid_argument("ode_loss_and_seed: observable dimension mismatch");
        const double q = expectation(rec.observable, rho.entries());
        const double e = rec.value - q;
        loss += e * e / n_rec;

        // deltaL_j / delta|v><v| = -(2/N)(value - q)/weight * (O (x) Pi - q (1 (x) Pi)),
        // split into its two PSD pieces.
        const double kappa = -2.0 * e / (n_rec * weight);
        const double tr_m = rec.observable.trace().real() * n_pos;
        if (tr_m <= 0.0) throw std::invalid_argument("ode_loss_and_seed: observable not PSD");
        seed.components.push_back(
            SeedComponent::make_mixed(kappa, tr_m, kron(rec.observable, pi) / tr_m));
        const double tr_p = double(d) * n_pos;
        seed.components.push_back(SeedComponent::make_mixed(
            kappa, -q * tr_p, kron(Mat::Identity(d, d), pi) / tr_p));
    }
    return {loss, std::move(seed)};
}

Vec classical_solve(const LinearSystem& sys, std::span<const double> theta, const Vec& u0,
                    double T, long steps) {
    bool time_dep = false;
    for (const auto& t : sys.terms)
        if (t.schedule.depends_on_time()) time_dep = true;
    if (!time_dep) {
        const Mat m = (cplx(0, -1) * T * sys.dense(0.0, theta)).exp();
        return m * u0;
    }
    Vec u = u0;
    const double dt = T / double(steps);
    for (long i = 0; i < steps; ++i) {
        const double mid = (double(i) + 0.5) * dt;
        u = (cplx(0, -1) * dt * sys.dense(mid, theta)).exp() * u;
    }
    return u;
}

LinearSystem builtin_decay() {
    Mat a = Mat::Zero(2, 2);
    a(0, 0) = cplx(0, -1);  // A = -i |0><0|, so du0/dt = -theta u0
    Schedule s;
    s.kind = Schedule::Kind::Constant;
    s.theta_index = 0;
    LinearSystem sys;
    sys.terms.push_back({std::move(a), s});
    sys.num_parameters = 1;
    return sys;
}

std::vector<CollocationRecord> decay_records(double a_star, const Vec& u0, double T) {
    const LinearSystem sys = builtin_decay();
    const double theta[] = {a_star};
    const Vec u = classical_solve(sys, theta, u0, T);
    const double total = u.squaredNorm();
    std::vector<CollocationRecord> records;
    for (Index j = 0; j < u.size(); ++j) {
        Mat o = Mat::Zero(u.size(), u.size());
        o(j, j) = 1.0;
        records.push_back({std::move(o), std::norm(u(j)) / total});
    }
    return records;
}

} // namespace qnode
