#include "qnode/continuous.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qnode {

double GFunction::shape(double s, double T) const {
    if (s < 0.0 || s > T) return 0.0;
    if (kind == Kind::TopHat) return 1.0;
    if (taper <= 0.0) return 1.0;
    const double edge = std::min(s, T - s);
    if (edge >= taper) return 1.0;
    return 0.5 * (1.0 - std::cos(M_PI * edge / taper));
}

SRegister SRegister::midpoint(std::size_t n_points, double T, const GFunction& gf) {
    return from_grid(TimeGrid::midpoint(n_points, T), T, gf);
}

SRegister SRegister::from_grid(const TimeGrid& grid, double T, const GFunction& gf) {
    SRegister r;
    r.points = grid.points;
    r.weights = grid.weights;
    r.g.resize(r.points.size());
    double norm = 0.0;
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        r.g[i] = gf.shape(r.points[i], T);
        norm += r.weights[i] * r.g[i];
    }
    if (norm <= 0.0) throw std::invalid_argument("SRegister: density vanishes on the grid");
    for (double& v : r.g) v /= norm;
    return r;
}

double HatEta::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < blocks.size(); ++i) t += block_weights[i] * blocks[i].trace();
    return t;
}

HatEta build_hat_eta(const ParametricHamiltonian& h, std::span<const double> theta,
                     const SeedComponent& comp, const DensityMatrix& rho0, double T,
                     const SRegister& sreg) {
    if (!h.is_time_independent())
        throw std::invalid_argument("build_hat_eta: time-dependent Hamiltonian not supported");
    const ExtendedState eta0 = build_eta0(comp, rho0);
    HatEta out;
    for (std::size_t i = 0; i < sreg.points.size(); ++i) {
        out.blocks.push_back(eta_at(eta0, h, theta, sreg.points[i], T));
        out.block_weights.push_back(sreg.weights[i] * sreg.g[i]);
    }
    return out;
}

GradientEstimate theorem3_gradient(const ParametricHamiltonian& h, std::span<const double> theta,
                                   const DensityMatrix& rho0, const AdjointSeed& seed, double T,
                                   const SRegister& sreg, const ShotBudget& shots,
                                   std::uint64_t master_seed) {
    if (!h.is_time_independent())
        throw std::invalid_argument("theorem3_gradient: time-dependent Hamiltonian not supported");
    if (seed.components.empty()) throw std::invalid_argument("theorem3_gradient: empty seed");
    if (sreg.points.empty() || sreg.points.size() != sreg.weights.size())
        throw std::invalid_argument("theorem3_gradient: invalid register");

    const std::size_t m_count = h.num_parameters();
    std::vector<double> grad(m_count, 0.0), var(m_count, 0.0), gtmp(m_count, 0.0);

    for (std::size_t j = 0; j < seed.components.size(); ++j) {
        const SeedComponent& comp = seed.components[j];
        const HatEta hat = build_hat_eta(h, theta, comp, rho0, T, sreg);
        const double scale = 2.0 * T * comp.c * comp.A_T;

        if (shots.exact()) {
            RngStream unused(0);
            for (std::size_t i = 0; i < hat.blocks.size(); ++i) {
                for (std::size_t k = 0; k < h.terms().size(); ++k) {
                    if (!h.terms()[k].schedule.depends_on_theta()) continue;
                    const auto [e, sig] =
                        theorem2_expectation(hat.blocks[i], h, k, shots, unused);
                    std::fill(gtmp.begin(), gtmp.end(), 0.0);
                    h.terms()[k].schedule.add_grad(sreg.points[i], theta, 1.0, gtmp);
                    for (std::size_t m = 0; m < m_count; ++m)
                        grad[m] += scale * hat.block_weights[i] * gtmp[m] * e;
                }
            }
            continue;
        }

        // One s-extended observable per parameter: mixture over clock blocks,
        // then the block's Born distribution of sigma_Y (x) dH/dtheta_m.
        for (std::size_t m = 0; m < m_count; ++m) {
            const Mat dh = h.parameter_derivative(sreg.points.front(), theta, m);
            if (dh.cwiseAbs().maxCoeff() == 0.0) continue;
            const HermitianObservable obs(dh, h.dims());
            const RealVec& lambda = obs.spectrum().eigenvalues;

            std::vector<double> prob;
            std::vector<double> value;
            for (std::size_t i = 0; i < hat.blocks.size(); ++i) {
                const std::vector<double> p = extended_born_distribution(hat.blocks[i], obs);
                for (Index q = 0; q < lambda.size(); ++q) {
                    prob.push_back(hat.block_weights[i] * p[2 * q]);
                    value.push_back(lambda(q));
                    prob.push_back(hat.block_weights[i] * p[2 * q + 1]);
                    value.push_back(-lambda(q));
                }
            }
            double total = 0.0;
            for (double p : prob) total += p;
            if (total <= 0.0)
                throw std::runtime_error("theorem3_gradient: degenerate distribution");
            std::vector<double> cdf(prob.size());
            double acc = 0.0;
            for (std::size_t i = 0; i < prob.size(); ++i) {
                acc += prob[i] / total;
                cdf[i] = acc;
            }
            cdf.back() = 1.0;

            RngStream rng(derive_seed(master_seed, {j, m}));
            double sum = 0.0, sumsq = 0.0;
            for (long s = 0; s < shots.shots; ++s) {
                const double u = rng.uniform();
                const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
                const double x = value[std::size_t(it - cdf.begin())];
                sum += x;
                sumsq += x * x;
            }
            const double n = double(shots.shots);
            const double mean = sum / n;
            const double sv =
                shots.shots > 1 ? std::max(0.0, (sumsq - n * mean * mean) / (n - 1.0)) : 0.0;
            grad[m] += scale * mean;
            const double se = scale * std::sqrt(sv / n);
            var[m] += se * se;
        }
    }

    GradientEstimate out;
    out.values = std::move(grad);
    out.stderrs.resize(m_count);
    for (std::size_t m = 0; m < m_count; ++m) out.stderrs[m] = std::sqrt(var[m]);
    out.grid_desc = "s-register[n=" + std::to_string(sreg.points.size()) + "]";
    out.shots = shots.shots;
    out.seed = master_seed;
    return out;
}

BoundCheckResult bound_check(const ParametricHamiltonian& h, std::span<const double> theta,
                             const DensityMatrix& rho0, const AdjointSeed& seed, double T,
                             const GFunction& g, std::size_t n_points) {
    if (seed.components.size() != 1)
        throw std::invalid_argument("bound_check: single-component seed required");
    const SeedComponent& comp = seed.components.front();

    const SRegister top = SRegister::midpoint(n_points, T, GFunction{});
    const SRegister smooth = SRegister::midpoint(n_points, T, g);
    const ShotBudget exact = ShotBudget::exact_budget();
    const GradientEstimate ref = theorem3_gradient(h, theta, rho0, seed, T, top, exact, 0);
    const GradientEstimate est = theorem3_gradient(h, theta, rho0, seed, T, smooth, exact, 0);

    // The proof bounds the discrepancy by ||O_m||_inf * integral |g_top - g|.
    double l1 = 0.0;
    for (std::size_t i = 0; i < top.points.size(); ++i)
        l1 += top.weights[i] * std::abs(top.g[i] - smooth.g[i]);

    const double denom = 2.0 * T * comp.c * comp.A_T;
    BoundCheckResult out;
    out.holds = true;
    for (std::size_t m = 0; m < h.num_parameters(); ++m) {
        const double lhs = std::abs(ref.values[m] / denom - est.values[m] / denom);
        const Mat dh = h.parameter_derivative(top.points.front(), theta, m);
        const double norm = HermitianObservable(dh, h.dims()).operator_norm();
        const double rhs = norm * l1;
        out.lhs.push_back(lhs);
        out.rhs.push_back(rhs);
        if (lhs > rhs + 1e-9) out.holds = false;
    }
    return out;
}

double tv_distance(const std::vector<double>& g1, const std::vector<double>& g2,
                   const SRegister& sreg) {
    if (g1.size() != sreg.points.size() || g2.size() != sreg.points.size())
        throw std::invalid_argument("tv_distance: size mismatch");
    double n1 = 0.0, n2 = 0.0, dist = 0.0;
    for (std::size_t i = 0; i < g1.size(); ++i) {
        n1 += sreg.weights[i] * g1[i];
        n2 += sreg.weights[i] * g2[i];
        dist += sreg.weights[i] * std::abs(g1[i] - g2[i]);
    }
    if (std::abs(n1 - 1.0) > 1e-9 || std::abs(n2 - 1.0) > 1e-9)
        throw std::invalid_argument("tv_distance: densities not normalised on the grid");
    return 0.5 * dist;
}

} // namespace qnode
