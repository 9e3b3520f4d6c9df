#pragma once

// Self-contained reference implementations the library is checked against:
// central finite differences through the loss, direct loss evaluations, and
// random problem instances. Everything here goes through the public evolve
// API only, never through the gradient engines under test.

#include <cmath>
#include <functional>
#include <vector>

#include "qnode/adjoint.hpp"
#include "qnode/losses.hpp"

namespace oracles {

using qnode::DensityMatrix;
using qnode::Mat;
using qnode::ParametricHamiltonian;
using qnode::PropagatorConfig;
using qnode::StateVector;
using qnode::Vec;

// Central finite differences of a scalar function of theta.
inline std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                       const std::vector<double>& theta, double h = 1e-5) {
    std::vector<double> g(theta.size());
    for (std::size_t m = 0; m < theta.size(); ++m) {
        std::vector<double> tp = theta, tm = theta;
        tp[m] += h;
        tm[m] -= h;
        g[m] = (f(tp) - f(tm)) / (2.0 * h);
    }
    return g;
}

inline Mat evolved_density(const ParametricHamiltonian& h, const std::vector<double>& theta,
                           const DensityMatrix& rho0, double T,
                           const PropagatorConfig& prop = {}) {
    return qnode::evolve_density(h, theta, rho0.entries(), 0.0, T, prop);
}

// L = 1 - tr(sigma rho(T)).
inline double stateprep_loss(const ParametricHamiltonian& h, const std::vector<double>& theta,
                             const DensityMatrix& rho0, const DensityMatrix& sigma, double T,
                             const PropagatorConfig& prop = {}) {
    return 1.0 - (sigma.entries() * evolved_density(h, theta, rho0, T, prop)).trace().real();
}

// L = weight * sum_r (value_r - tr(O_r rho(T)))^2.
inline double observable_loss(const ParametricHamiltonian& h, const std::vector<double>& theta,
                              const DensityMatrix& rho0,
                              const std::vector<qnode::ObservableRecord>& records, double weight,
                              double T, const PropagatorConfig& prop = {}) {
    const Mat rhoT = evolved_density(h, theta, rho0, T, prop);
    double loss = 0.0;
    for (const auto& r : records) {
        const double pred = (r.observable.dense() * rhoT).trace().real();
        loss += weight * (pred - r.value) * (pred - r.value);
    }
    return loss;
}

// L = 1 - tr(tr_e(rho(T))^2) with the trailing d_e dimensions traced out.
inline double purity_loss(const ParametricHamiltonian& h, const std::vector<double>& theta,
                          const DensityMatrix& rho0, qnode::Index d_e, double T,
                          const PropagatorConfig& prop = {}) {
    const Mat rhoT = evolved_density(h, theta, rho0, T, prop);
    const qnode::Index d_s = rhoT.rows() / d_e;
    Mat red = Mat::Zero(d_s, d_s);
    for (qnode::Index a = 0; a < d_s; ++a)
        for (qnode::Index b = 0; b < d_s; ++b)
            for (qnode::Index e = 0; e < d_e; ++e) red(a, b) += rhoT(a * d_e + e, b * d_e + e);
    return 1.0 - (red * red).trace().real();
}

inline std::vector<double> random_theta(std::size_t n, qnode::RngStream& rng, double lo = -1.0,
                                        double hi = 1.0) {
    std::vector<double> t(n);
    for (double& v : t) v = rng.uniform(lo, hi);
    return t;
}

} // namespace oracles
