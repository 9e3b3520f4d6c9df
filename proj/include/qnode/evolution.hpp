#pragma once

#include <optional>

#include "qnode/hamiltonian.hpp"

namespace qnode {

enum class PropagatorMethod { Exact, Trotter1 };

struct PropagatorConfig {
    PropagatorMethod method = PropagatorMethod::Exact;
    // Time-slice width; 0 picks 1e-3 * |interval| for Exact and 1e-2 * |interval|
    // for Trotter1. Time-independent Hamiltonians use a closed form regardless.
    double dtau = 0.0;
};

// U(s1, s0): evolves states from time s0 to time s1. s1 < s0 returns the
// adjoint of the forward propagator.
Mat propagator(const ParametricHamiltonian& h, std::span<const double> theta, double s0,
               double s1, const PropagatorConfig& cfg = {});

Vec evolve_state(const ParametricHamiltonian& h, std::span<const double> theta, const Vec& psi,
                 double s0, double s1, const PropagatorConfig& cfg = {});

Mat evolve_density(const ParametricHamiltonian& h, std::span<const double> theta, const Mat& rho,
                   double s0, double s1, const PropagatorConfig& cfg = {});

// Cached eigendecomposition for a fixed Hermitian generator: U(dt) = V e^{-i dt L} V^t.
class SpectralPropagator {
  public:
    explicit SpectralPropagator(const Mat& h);
    Mat at(double dt) const;
    void apply(Vec& psi, double dt) const;

  private:
    Spectrum spec_;
};

// Repeated state evolution under a fixed theta without materialising
// propagator matrices. Time-independent Hamiltonians go through cached
// spectra (the term's own for single-term generators, a one-off
// decomposition otherwise); time-dependent ones fall back to propagator().
class FastEvolver {
  public:
    FastEvolver(const ParametricHamiltonian& h, std::span<const double> theta,
                const PropagatorConfig& cfg = {});
    // psi(s1) from psi(s0); s1 < s0 evolves backward.
    void apply(Vec& psi, double s0, double s1) const;

  private:
    const ParametricHamiltonian* h_;
    std::vector<double> theta_;
    PropagatorConfig cfg_;
    const Spectrum* term_spec_ = nullptr;  // single-term fast path
    double scale_ = 1.0;
    std::optional<SpectralPropagator> sp_;
};

} // namespace qnode
