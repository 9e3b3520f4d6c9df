#include "qnode/evolution.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace qnode {

SpectralPropagator::SpectralPropagator(const Mat& h) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    spec_ = Spectrum{es.eigenvalues(), es.eigenvectors()};
}

Mat SpectralPropagator::at(double dt) const {
    const Index d = spec_.eigenvalues.size();
    Vec phases(d);
    for (Index i = 0; i < d; ++i)
        phases(i) = std::exp(cplx(0, -dt * spec_.eigenvalues(i)));
    return spec_.eigenvectors * phases.asDiagonal() * spec_.eigenvectors.adjoint();
}

void SpectralPropagator::apply(Vec& psi, double dt) const {
    Vec c = spec_.eigenvectors.adjoint() * psi;
    for (Index i = 0; i < c.size(); ++i)
        c(i) *= std::exp(cplx(0, -dt * spec_.eigenvalues(i)));
    psi = spec_.eigenvectors * c;
}

namespace {

Mat exp_minus_i(const Mat& h, double dt) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Vec phases(h.rows());
    for (Index i = 0; i < h.rows(); ++i)
        phases(i) = std::exp(cplx(0, -dt * es.eigenvalues()(i)));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Mat forward_propagator(const ParametricHamiltonian& h, std::span<const double> theta, double s0,
                       double s1, const PropagatorConfig& cfg) {
    const double span = s1 - s0;
    if (span == 0.0) return Mat::Identity(h.dim(), h.dim());

    if (h.is_time_independent()) {
        if (h.terms().size() == 1 && cfg.method == PropagatorMethod::Exact) {
            // Scaled single-term fast path: cache the unit spectrum on the term.
            const auto& term = h.terms().front();
            const double f = term.schedule.value(s0, theta);
            const Spectrum& spec = term.op.spectrum();
            Vec phases(h.dim());
            for (Index i = 0; i < h.dim(); ++i)
                phases(i) = std::exp(cplx(0, -span * f * spec.eigenvalues(i)));
            return spec.eigenvectors * phases.asDiagonal() * spec.eigenvectors.adjoint();
        }
        if (cfg.method == PropagatorMethod::Exact) return exp_minus_i(h.dense(s0, theta), span);
    }

    const double base = cfg.method == PropagatorMethod::Exact ? 1e-3 : 1e-2;
    const double dtau = cfg.dtau > 0.0 ? cfg.dtau : base * std::abs(span);
    const auto steps = std::max<long>(1, static_cast<long>(std::ceil(std::abs(span) / dtau)));
    const double dt = span / double(steps);

    Mat u = Mat::Identity(h.dim(), h.dim());
    if (cfg.method == PropagatorMethod::Exact) {
        for (long i = 0; i < steps; ++i) {
            const double mid = s0 + (double(i) + 0.5) * dt;
            u = exp_minus_i(h.dense(mid, theta), dt) * u;
        }
        return u;
    }

    // First-order term splitting in declaration order; each term exponential
    // comes from the term's cached unit spectrum.
    for (long i = 0; i < steps; ++i) {
        const double mid = s0 + (double(i) + 0.5) * dt;
        Mat step = Mat::Identity(h.dim(), h.dim());
        for (const auto& term : h.terms()) {
            const double f = term.schedule.value(mid, theta);
            if (f == 0.0) continue;
            const Spectrum& spec = term.op.spectrum();
            Vec phases(h.dim());
            for (Index j = 0; j < h.dim(); ++j)
                phases(j) = std::exp(cplx(0, -dt * f * spec.eigenvalues(j)));
            step = spec.eigenvectors * phases.asDiagonal() * spec.eigenvectors.adjoint() * step;
        }
        u = step * u;
    }
    return u;
}

} // namespace

Mat propagator(const ParametricHamiltonian& h, std::span<const double> theta, double s0,
               double s1, const PropagatorConfig& cfg) {
    if (s1 >= s0) return forward_propagator(h, theta, s0, s1, cfg);
    return forward_propagator(h, theta, s1, s0, cfg).adjoint();
}

Vec evolve_state(const ParametricHamiltonian& h, std::span<const double> theta, const Vec& psi,
                 double s0, double s1, const PropagatorConfig& cfg) {
    return propagator(h, theta, s0, s1, cfg) * psi;
}

Mat evolve_density(const ParametricHamiltonian& h, std::span<const double> theta, const Mat& rho,
                   double s0, double s1, const PropagatorConfig& cfg) {
    const Mat u = propagator(h, theta, s0, s1, cfg);
    return u * rho * u.adjoint();
}

FastEvolver::FastEvolver(const ParametricHamiltonian& h, std::span<const double> theta,
                         const PropagatorConfig& cfg)
    : h_(&h), theta_(theta.begin(), theta.end()), cfg_(cfg) {
    if (!h.is_time_independent() || cfg.method != PropagatorMethod::Exact) return;
    if (h.terms().size() == 1) {
        term_spec_ = &h.terms().front().op.spectrum();
        scale_ = h.coefficient(0, 0.0, theta);
    } else {
        sp_.emplace(h.dense(0.0, theta));
    }
}

void FastEvolver::apply(Vec& psi, double s0, double s1) const {
    if (s0 == s1) return;
    if (term_spec_) {
        Vec c = term_spec_->eigenvectors.adjoint() * psi;
        for (Index i = 0; i < c.size(); ++i)
            c(i) *= std::exp(cplx(0, -(s1 - s0) * scale_ * term_spec_->eigenvalues(i)));
        psi = term_spec_->eigenvectors * c;
        return;
    }
    if (sp_) {
        sp_->apply(psi, s1 - s0);
        return;
    }
    psi = evolve_state(*h_, theta_, psi, s0, s1, cfg_);
}

} // namespace qnode
