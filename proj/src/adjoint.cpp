#include "qnode/adjoint.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qnode {

namespace {

using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Internal state representation shared by the forward and backward walks.
struct Rep {
    std::optional<Vec> pure;
    Mat mixed;

    Mat as_matrix() const { return pure ? Mat(*pure * pure->adjoint()) : mixed; }
};

std::optional<Vec> try_pure(const DensityMatrix& rho) {
    if (rho.purity() < 1.0 - 1e-12) return std::nullopt;
    Eigen::SelfAdjointEigenSolver<Mat> es(rho.entries());
    Index top;
    es.eigenvalues().maxCoeff(&top);
    Vec v = es.eigenvectors().col(top);
    return v / v.norm();
}

Rep make_rep(const DensityMatrix& rho) {
    if (auto v = try_pure(rho)) return Rep{std::move(v), Mat()};
    return Rep{std::nullopt, rho.entries()};
}

Rep make_rep(const SeedComponent& comp) {
    if (comp.a_pure) return Rep{comp.a_pure, Mat()};
    return Rep{std::nullopt, comp.a_T};
}

} // namespace

SeedComponent SeedComponent::make_pure(double c, double A_T, Vec a) {
    SeedComponent s;
    s.c = c;
    s.A_T = A_T;
    a /= a.norm();
    s.a_T = a * a.adjoint();
    s.a_pure = std::move(a);
    return s;
}

SeedComponent SeedComponent::make_mixed(double c, double A_T, Mat a) {
    SeedComponent s;
    s.c = c;
    s.A_T = A_T;
    // Promote rank-1 seeds so the gradient engines can use the pure-state
    // paths; tr(a^2) = ||a||_F^2 for Hermitian a makes the screen cheap.
    if (std::abs(a.squaredNorm() - 1.0) < 1e-12) {
        Eigen::SelfAdjointEigenSolver<Mat> es(a);
        Index top;
        es.eigenvalues().maxCoeff(&top);
        Vec v = es.eigenvectors().col(top);
        s.a_pure = v / v.norm();
    }
    s.a_T = std::move(a);
    return s;
}

Mat AdjointSeed::delta_L_matrix(Index d) const {
    Mat out = Mat::Zero(d, d);
    for (const auto& comp : components) out += comp.c * comp.A_T * comp.a_T;
    return out;
}

TimeGrid TimeGrid::trapezoid(std::size_t n_points, double T) {
    if (n_points < 2) throw std::invalid_argument("TimeGrid::trapezoid: need >= 2 points");
    TimeGrid g;
    g.rule = Rule::Trapezoid;
    const double h = T / double(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i) {
        g.points.push_back(double(i) * h);
        g.weights.push_back(i == 0 || i + 1 == n_points ? 0.5 * h : h);
    }
    return g;
}

TimeGrid TimeGrid::midpoint(std::size_t n_points, double T) {
    if (n_points < 1) throw std::invalid_argument("TimeGrid::midpoint: need >= 1 point");
    TimeGrid g;
    g.rule = Rule::Midpoint;
    const double h = T / double(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        g.points.push_back((double(i) + 0.5) * h);
        g.weights.push_back(h);
    }
    return g;
}

TimeGrid TimeGrid::uniform_random(std::size_t n_samples, double T, RngStream& rng) {
    if (n_samples < 1) throw std::invalid_argument("TimeGrid::uniform_random: need >= 1 sample");
    TimeGrid g;
    g.rule = Rule::UniformRandom;
    for (std::size_t i = 0; i < n_samples; ++i) g.points.push_back(rng.uniform(0.0, T));
    std::sort(g.points.begin(), g.points.end());
    g.weights.assign(n_samples, T / double(n_samples));
    return g;
}

std::string TimeGrid::describe() const {
    const char* name = rule == Rule::Trapezoid ? "trapezoid"
                       : rule == Rule::Midpoint ? "midpoint"
                                                : "uniform-random";
    return std::string(name) + "[n=" + std::to_string(points.size()) + "]";
}

ExtendedState ExtendedState::pure(Vec v, Index original_dim) {
    ExtendedState e;
    if (v.size() != 2 * original_dim * original_dim)
        throw std::invalid_argument("ExtendedState: bad vector size");
    e.pure_ = std::move(v);
    e.d_ = original_dim;
    return e;
}

ExtendedState ExtendedState::mixed(Mat m, Index original_dim) {
    ExtendedState e;
    if (m.rows() != 2 * original_dim * original_dim || m.rows() != m.cols())
        throw std::invalid_argument("ExtendedState: bad matrix size");
    e.mixed_ = std::move(m);
    e.d_ = original_dim;
    return e;
}

const Vec& ExtendedState::vector() const {
    if (!pure_) throw std::logic_error("ExtendedState: not pure");
    return *pure_;
}

Mat ExtendedState::matrix() const {
    if (pure_) return *pure_ * pure_->adjoint();
    return mixed_;
}

double ExtendedState::trace() const {
    if (pure_) return pure_->squaredNorm();
    return mixed_.trace().real();
}

double ExtendedState::purity() const {
    if (pure_) {
        const double n = pure_->squaredNorm();
        return n * n;
    }
    return (mixed_ * mixed_).trace().real();
}

namespace {

ExtendedState make_extended(const Rep& a, const Rep& r, Index d) {
    const Vec plus = ket_plus();
    if (a.pure && r.pure) {
        Vec v = kron(plus, kron(*a.pure, *r.pure));
        apply_controlled_swap(v, d);
        return ExtendedState::pure(std::move(v), d);
    }
    const Mat plus_m = plus * plus.adjoint();
    Mat chi = kron(plus_m, kron(a.as_matrix(), r.as_matrix()));
    apply_controlled_swap(chi, d);
    return ExtendedState::mixed(std::move(chi), d);
}

// -Im tr(H_k a(s) rho(s)) in whatever factored form is available; equals
// tr(sigma_Y (x) H_k (x) 1 eta(s)) by the swap-trick identity.
double analytic_expectation(const Mat& hk, const Rep& a, const Rep& r) {
    if (a.pure && r.pure) {
        const cplx z = (r.pure->adjoint() * hk * (*a.pure))(0) * a.pure->dot(*r.pure);
        return -z.imag();
    }
    if (!a.pure && r.pure) {
        const cplx z = (r.pure->adjoint() * hk * (a.mixed * (*r.pure)))(0);
        return -z.imag();
    }
    const Mat am = a.as_matrix();
    const Mat rm = r.as_matrix();
    return -((hk * am * rm).trace()).imag();
}

} // namespace

ExtendedState build_eta0(const SeedComponent& comp, const DensityMatrix& rho0) {
    if (comp.a_T.rows() != rho0.dim())
        throw std::invalid_argument("build_eta0: seed/state dimension mismatch");
    Rep a = make_rep(comp);
    Rep r = make_rep(rho0);
    const Index d = rho0.dim();
    const Vec plus = ket_plus();
    if (a.pure && r.pure)
        return ExtendedState::pure(kron(plus, kron(*a.pure, *r.pure)), d);
    const Mat plus_m = plus * plus.adjoint();
    return ExtendedState::mixed(kron(plus_m, kron(a.as_matrix(), r.as_matrix())), d);
}

ExtendedState eta_at(const ExtendedState& eta0, const ParametricHamiltonian& h,
                     std::span<const double> theta, double s, double T,
                     const PropagatorConfig& cfg) {
    if (s < 0.0 || s > T) throw std::invalid_argument("eta_at: s outside [0, T]");
    const Index d = eta0.original_dim();
    const Mat ua = propagator(h, theta, T, s, cfg);  // backward, T -> s
    const Mat ur = propagator(h, theta, 0.0, s, cfg);
    const Mat w = kron(Mat::Identity(2, 2), kron(ua, ur));
    if (eta0.is_pure()) {
        Vec v = w * eta0.vector();
        apply_controlled_swap(v, d);
        return ExtendedState::pure(std::move(v), d);
    }
    Mat m = w * eta0.matrix() * w.adjoint();
    apply_controlled_swap(m, d);
    return ExtendedState::mixed(std::move(m), d);
}

std::vector<double> extended_born_distribution(const ExtendedState& eta,
                                               const HermitianObservable& obs) {
    const Index d = eta.original_dim();
    if (obs.dim() != d)
        throw std::invalid_argument("extended_born_distribution: dimension mismatch");

    // Ancilla (x) adjoint blocks of tr_orig(eta).
    Mat r00(d, d), r01(d, d), r11(d, d);
    if (eta.is_pure()) {
        const Vec& v = eta.vector();
        Eigen::Map<const RowMat> b(v.data(), 2 * d, d);
        Mat red = b * b.adjoint();
        r00 = red.block(0, 0, d, d);
        r01 = red.block(0, d, d, d);
        r11 = red.block(d, d, d, d);
    } else {
        const Mat m = eta.matrix();
        auto block = [&](Index b, Index bp) {
            Mat out(d, d);
            for (Index i = 0; i < d; ++i)
                for (Index ip = 0; ip < d; ++ip) {
                    cplx acc = 0;
                    for (Index j = 0; j < d; ++j)
                        acc += m(b * d * d + i * d + j, bp * d * d + ip * d + j);
                    out(i, ip) = acc;
                }
            return out;
        };
        r00 = block(0, 0);
        r01 = block(0, 1);
        r11 = block(1, 1);
    }

    // Eigenvectors of sigma_Y (x) obs are y_pm (x) h_j with eigenvalue
    // pm lambda_j; projecting onto them mixes the blocks through sigma_Y's
    // eigenvectors (1, pm i)/sqrt(2).
    const Spectrum& spec = obs.spectrum();
    const Mat& vmat = spec.eigenvectors;
    const Mat t00 = r00 * vmat, t11 = r11 * vmat, t01 = r01 * vmat;
    std::vector<double> prob(2 * std::size_t(d));
    for (Index j = 0; j < d; ++j) {
        const double djj = 0.5 * (vmat.col(j).dot(t00.col(j)).real() +
                                  vmat.col(j).dot(t11.col(j)).real());
        const double im01 = vmat.col(j).dot(t01.col(j)).imag();
        prob[2 * j] = std::max(djj - im01, 0.0);
        prob[2 * j + 1] = std::max(djj + im01, 0.0);
    }
    return prob;
}

std::pair<double, double> theorem2_expectation(const ExtendedState& eta,
                                               const ParametricHamiltonian& h, std::size_t k,
                                               const ShotBudget& shots, RngStream& rng) {
    if (k >= h.terms().size()) throw std::invalid_argument("theorem2_expectation: bad term");
    const Index d = eta.original_dim();
    const Mat& hk = h.terms()[k].op.entries();

    if (shots.exact()) {
        if (eta.is_pure()) {
            const Vec& v = eta.vector();
            // O v without materialising O: H_k on the adjoint register per
            // ancilla block, then sigma_Y across blocks.
            Eigen::Map<const RowMat> b0(v.data(), d, d);
            Eigen::Map<const RowMat> b1(v.data() + d * d, d, d);
            RowMat h0 = hk * b0;
            RowMat h1 = hk * b1;
            Vec w(2 * d * d);
            Eigen::Map<RowMat>(w.data(), d, d) = cplx(0, -1) * h1;
            Eigen::Map<RowMat>(w.data() + d * d, d, d) = cplx(0, 1) * h0;
            return {v.dot(w).real(), 0.0};
        }
        const Mat o = kron(pauli_y(), kron(hk, Mat::Identity(d, d)));
        return {(o * eta.matrix()).trace().real(), 0.0};
    }

    const std::vector<double> prob = extended_born_distribution(eta, h.terms()[k].op);
    const Spectrum& spec = h.terms()[k].op.spectrum();
    std::vector<double> value(2 * std::size_t(d));
    double total = 0.0;
    for (Index j = 0; j < d; ++j) {
        value[2 * j] = spec.eigenvalues(j);
        value[2 * j + 1] = -spec.eigenvalues(j);
        total += prob[2 * j] + prob[2 * j + 1];
    }
    if (total <= 0.0) throw std::runtime_error("theorem2_expectation: degenerate distribution");

    std::vector<double> cdf(prob.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < prob.size(); ++i) {
        acc += prob[i] / total;
        cdf[i] = acc;
    }
    cdf.back() = 1.0;

    double sum = 0.0, sumsq = 0.0;
    const long n = shots.shots;
    for (long s = 0; s < n; ++s) {
        const double u = rng.uniform();
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        const double x = value[std::size_t(it - cdf.begin())];
        sum += x;
        sumsq += x * x;
    }
    const double mean = sum / double(n);
    const double var = n > 1 ? std::max(0.0, (sumsq - double(n) * mean * mean) / double(n - 1))
                             : 0.0;
    return {mean, std::sqrt(var / double(n))};
}

namespace {

GradientEstimate theorem2_impl(const ParametricHamiltonian& h, std::span<const double> theta,
                               const Rep& rho0, const AdjointSeed& seed, double T,
                               const TimeGrid& grid, const ShotBudget& shots,
                               std::uint64_t master_seed, const GradientOptions& opts) {
    if (seed.components.empty()) throw std::invalid_argument("theorem2_gradient: empty seed");
    if (grid.points.size() != grid.weights.size() || grid.points.empty())
        throw std::invalid_argument("theorem2_gradient: invalid grid");
    const Index d = h.dim();
    const std::size_t m_count = h.num_parameters();
    const std::size_t n = grid.points.size();

    const bool time_indep = h.is_time_independent();
    // Resolve the automatic slice width against the full horizon, not the
    // individual inter-grid segments.
    PropagatorConfig prop = opts.prop;
    if (prop.dtau <= 0.0 && T > 0.0)
        prop.dtau = (prop.method == PropagatorMethod::Exact ? 1e-3 : 1e-2) * T;
    const FastEvolver fast(h, theta, prop);

    auto evolve_rep = [&](Rep& r, double s0, double s1) {
        if (s0 == s1) return;
        if (r.pure)
            fast.apply(*r.pure, s0, s1);
        else
            r.mixed = evolve_density(h, theta, r.mixed, s0, s1, prop);
    };

    // Forward states at every grid point (plus the terminal state for the
    // factored mixed-seed path).
    std::vector<Rep> forward(n);
    {
        Rep r = rho0;
        double prev = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            evolve_rep(r, prev, grid.points[i]);
            prev = grid.points[i];
            forward[i] = r;
        }
    }
    Rep terminal = forward.back();
    evolve_rep(terminal, grid.points.back(), T);

    const bool literal = opts.path == ExpectationPath::Literal ||
                         (opts.path == ExpectationPath::Auto && 2 * d * d <= 512);
    const bool use_extended = !shots.exact() || literal;

    std::vector<double> grad(m_count, 0.0), var(m_count, 0.0), gtmp(m_count, 0.0);

    for (std::size_t j = 0; j < seed.components.size(); ++j) {
        const SeedComponent& comp = seed.components[j];
        if (comp.A_T == 0.0) throw std::invalid_argument("theorem2_gradient: A_T is zero");
        if (comp.a_T.rows() != d)
            throw std::invalid_argument("theorem2_gradient: seed dimension mismatch");
        Rep a = make_rep(comp);

        // Factored route for mixed seeds on pure trajectories: never
        // materialise a(s), evolve H_k r(s) forward to T instead.
        const bool wtrick = !use_extended && time_indep && rho0.pure.has_value() && !a.pure;
        Vec y;
        if (wtrick) y = comp.a_T * (*terminal.pure);

        double prev = T;
        for (std::size_t ii = n; ii-- > 0;) {
            const double s = grid.points[ii];
            const double w = grid.weights[ii];
            if (!wtrick) {
                evolve_rep(a, prev, s);
                prev = s;
            }
            std::optional<ExtendedState> eta;
            if (use_extended) eta = make_extended(a, forward[ii], d);

            for (std::size_t k = 0; k < h.terms().size(); ++k) {
                const auto& term = h.terms()[k];
                if (!term.schedule.depends_on_theta()) continue;

                double e = 0.0, sigma = 0.0;
                if (use_extended) {
                    RngStream rng(derive_seed(master_seed, {j, ii, k}));
                    std::tie(e, sigma) = theorem2_expectation(*eta, h, k, shots, rng);
                } else if (wtrick) {
                    Vec w2 = term.op.entries() * (*forward[ii].pure);
                    fast.apply(w2, s, T);
                    e = -w2.dot(y).imag();
                } else {
                    e = analytic_expectation(term.op.entries(), a, forward[ii]);
                }

                std::fill(gtmp.begin(), gtmp.end(), 0.0);
                term.schedule.add_grad(s, theta, 1.0, gtmp);
                const double base = 2.0 * comp.c * comp.A_T * w;
                for (std::size_t m = 0; m < m_count; ++m) {
                    if (gtmp[m] == 0.0) continue;
                    grad[m] += base * gtmp[m] * e;
                    const double contrib = base * gtmp[m] * sigma;
                    var[m] += contrib * contrib;
                }
            }
        }
    }

    GradientEstimate out;
    out.values = std::move(grad);
    out.stderrs.resize(m_count);
    for (std::size_t m = 0; m < m_count; ++m) out.stderrs[m] = std::sqrt(var[m]);
    out.grid_desc = grid.describe();
    out.shots = shots.shots;
    out.seed = master_seed;
    return out;
}

} // namespace

GradientEstimate theorem2_gradient(const ParametricHamiltonian& h, std::span<const double> theta,
                                   const DensityMatrix& rho0, const AdjointSeed& seed, double T,
                                   const TimeGrid& grid, const ShotBudget& shots,
                                   std::uint64_t master_seed, const GradientOptions& opts) {
    return theorem2_impl(h, theta, make_rep(rho0), seed, T, grid, shots, master_seed, opts);
}

GradientEstimate theorem2_gradient(const ParametricHamiltonian& h, std::span<const double> theta,
                                   const StateVector& psi0, const AdjointSeed& seed, double T,
                                   const TimeGrid& grid, const ShotBudget& shots,
                                   std::uint64_t master_seed, const GradientOptions& opts) {
    Rep r{psi0.amplitudes(), Mat()};
    return theorem2_impl(h, theta, r, seed, T, grid, shots, master_seed, opts);
}

GradientEstimate adjoint_oracle_gradient(const ParametricHamiltonian& h,
                                         std::span<const double> theta, const DensityMatrix& rho0,
                                         const AdjointSeed& seed, double T, const TimeGrid& grid,
                                         const PropagatorConfig& cfg) {
    if (seed.components.empty()) throw std::invalid_argument("adjoint_oracle_gradient: empty seed");
    if (grid.points.size() != grid.weights.size() || grid.points.empty())
        throw std::invalid_argument("adjoint_oracle_gradient: invalid grid");
    const Index d = h.dim();
    const std::size_t m_count = h.num_parameters();
    const std::size_t n = grid.points.size();

    PropagatorConfig prop = cfg;
    if (prop.dtau <= 0.0 && T > 0.0)
        prop.dtau = (prop.method == PropagatorMethod::Exact ? 1e-3 : 1e-2) * T;

    std::vector<Mat> rho(n);
    {
        Mat r = rho0.entries();
        double prev = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            r = evolve_density(h, theta, r, prev, grid.points[i], prop);
            prev = grid.points[i];
            rho[i] = r;
        }
    }

    std::vector<double> grad(m_count, 0.0);
    for (const SeedComponent& comp : seed.components) {
        if (comp.a_T.rows() != d)
            throw std::invalid_argument("adjoint_oracle_gradient: dimension mismatch");
        Mat a = comp.a_T;
        double prev = T;
        for (std::size_t ii = n; ii-- > 0;) {
            const double s = grid.points[ii];
            a = evolve_density(h, theta, a, prev, s, prop);
            prev = s;
            for (std::size_t m = 0; m < m_count; ++m) {
                const Mat dh = h.parameter_derivative(s, theta, m);
                const cplx val = cplx(0, 1) * ((dh * a - a * dh) * rho[ii]).trace();
                grad[m] += grid.weights[ii] * comp.c * comp.A_T * val.real();
            }
        }
    }

    GradientEstimate out;
    out.values = std::move(grad);
    out.stderrs.assign(m_count, 0.0);
    out.grid_desc = grid.describe();
    return out;
}

GradientEstimate combine_corollary1(const std::vector<GradientEstimate>& parts,
                                    const std::vector<double>& coefficients) {
    if (parts.size() != coefficients.size() || parts.empty())
        throw std::invalid_argument("combine_corollary1: length mismatch");
    const std::size_t m_count = parts.front().values.size();
    GradientEstimate out;
    out.values.assign(m_count, 0.0);
    out.stderrs.assign(m_count, 0.0);
    out.grid_desc = parts.front().grid_desc;
    out.shots = parts.front().shots;
    out.seed = parts.front().seed;
    for (std::size_t p = 0; p < parts.size(); ++p) {
        if (parts[p].values.size() != m_count)
            throw std::invalid_argument("combine_corollary1: component length mismatch");
        for (std::size_t m = 0; m < m_count; ++m) {
            out.values[m] += coefficients[p] * parts[p].values[m];
            const double c = coefficients[p] * parts[p].stderrs[m];
            out.stderrs[m] += c * c;
        }
    }
    for (double& s : out.stderrs) s = std::sqrt(s);
    return out;
}

} // namespace qnode
