#pragma once

#include "qnode/adjoint.hpp"

namespace qnode {

struct GradCheckReport {
    double max_estimator_vs_oracle = 0.0;  // theorem-2 vs commutator-trace route
    double max_vs_finite_difference = 0.0;
    bool pass = false;
};

// Random single-qubit state-preparation instances: compares the extended-circuit
// estimator, the commutator-trace oracle, and central finite differences of the
// loss (h = 1e-5) on a fine trapezoid grid.
GradCheckReport grad_check(std::uint64_t seed, std::size_t instances = 10);

struct ScalingReport {
    std::vector<double> x;  // shots or grid sizes
    std::vector<double> y;  // stderr or quadrature error
    double slope = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

// Reported per-expectation stderr vs shots in {1e2..1e5}; expected slope -1/2.
ScalingReport shot_scaling_study(std::uint64_t seed);

// Trapezoid quadrature error vs grid size against a 10001-point reference on a
// time-independent instance (closed-form propagators, so the quadrature error
// is isolated); expected slope -2.
ScalingReport grid_scaling_study(std::uint64_t seed);

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace qnode
