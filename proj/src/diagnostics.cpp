#include "qnode/diagnostics.hpp"

#include <cmath>

#include "qnode/losses.hpp"
#include "qnode/training.hpp"

namespace qnode {

namespace {

double stateprep_loss(const ParametricHamiltonian& h, std::span<const double> theta,
                      const StateVector& psi0, const DensityMatrix& sigma, double T,
                      const PropagatorConfig& prop) {
    Mat rho0 = DensityMatrix::from_pure(psi0).entries();
    Mat rhoT = evolve_density(h, theta, rho0, 0.0, T, prop);
    return 1.0 - (sigma.entries() * rhoT).trace().real();
}

} // namespace

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double lx = std::log(x[i]);
        double ly = std::log(std::max(y[i], 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

GradCheckReport grad_check(std::uint64_t seed, std::size_t instances) {
    GradCheckReport report;
    ParametricHamiltonian h = builtin_single_qubit();
    const double T = 1.0;
    TimeGrid grid = TimeGrid::trapezoid(1001, T);
    PropagatorConfig prop;  // time-independent: closed form

    for (std::size_t inst = 0; inst < instances; ++inst) {
        RngStream rng(derive_seed(seed, {20, inst}));
        std::vector<double> theta(h.num_parameters());
        for (double& t : theta) t = rng.uniform(-1.0, 1.0);
        StateVector psi0 = random_input_state(1, rng);
        DensityMatrix sigma = DensityMatrix::from_pure(random_input_state(1, rng));

        Mat rho0 = DensityMatrix::from_pure(psi0).entries();
        Mat rhoT = evolve_density(h, theta, rho0, 0.0, T, prop);
        auto [loss, adj_seed] =
            stateprep_loss_and_seed(DensityMatrix(rhoT, psi0.dims()), sigma);
        (void)loss;

        GradientEstimate est = theorem2_gradient(h, theta, psi0, adj_seed, T, grid,
                                                 ShotBudget::exact_budget(), seed);
        GradientEstimate oracle = adjoint_oracle_gradient(
            h, theta, DensityMatrix(rho0, psi0.dims()), adj_seed, T, grid, prop);

        const double fd_h = 1e-5;
        for (std::size_t m = 0; m < theta.size(); ++m) {
            std::vector<double> tp = theta, tm = theta;
            tp[m] += fd_h;
            tm[m] -= fd_h;
            double fd = (stateprep_loss(h, tp, psi0, sigma, T, prop) -
                         stateprep_loss(h, tm, psi0, sigma, T, prop)) /
                        (2.0 * fd_h);
            report.max_estimator_vs_oracle =
                std::max(report.max_estimator_vs_oracle, std::abs(est.values[m] - oracle.values[m]));
            report.max_vs_finite_difference =
                std::max(report.max_vs_finite_difference, std::abs(est.values[m] - fd));
        }
    }
    report.pass = report.max_estimator_vs_oracle < 1e-8 && report.max_vs_finite_difference < 1e-5;
    return report;
}

ScalingReport shot_scaling_study(std::uint64_t seed) {
    ScalingReport report;
    report.expected = -0.5;
    report.tolerance = 0.1;

    ParametricHamiltonian h = builtin_single_qubit();
    RngStream rng(derive_seed(seed, {21}));
    std::vector<double> theta(h.num_parameters());
    for (double& t : theta) t = rng.uniform(-1.0, 1.0);
    StateVector psi0 = random_input_state(1, rng);
    DensityMatrix sigma = DensityMatrix::from_pure(random_input_state(1, rng));
    const double T = 1.0;
    TimeGrid grid = TimeGrid::trapezoid(21, T);

    Mat rho0 = DensityMatrix::from_pure(psi0).entries();
    Mat rhoT = evolve_density(h, theta, rho0, 0.0, T, {});
    auto [loss, adj_seed] = stateprep_loss_and_seed(DensityMatrix(rhoT, psi0.dims()), sigma);
    (void)loss;

    for (long shots : {100L, 1000L, 10000L, 100000L}) {
        GradientEstimate est = theorem2_gradient(h, theta, psi0, adj_seed, T, grid,
                                                 ShotBudget::finite(shots),
                                                 derive_seed(seed, {22, (std::uint64_t)shots}));
        double se = 0.0;
        for (double s : est.stderrs) se += s * s;
        report.x.push_back(static_cast<double>(shots));
        report.y.push_back(std::sqrt(se));
    }
    report.slope = fit_loglog_slope(report.x, report.y);
    report.pass = std::abs(report.slope - report.expected) <= report.tolerance;
    return report;
}

ScalingReport grid_scaling_study(std::uint64_t seed) {
    ScalingReport report;
    report.expected = -2.0;
    report.tolerance = 0.2;

    // Time-independent instance with random coefficients: closed-form
    // propagators isolate the quadrature error of the s-integral.
    BuiltinModel model = builtin_hydrogen_ansatz();
    const ParametricHamiltonian& h = model.hamiltonian;
    RngStream rng(derive_seed(seed, {23}));
    std::vector<double> theta(h.num_parameters());
    for (double& t : theta) t = rng.uniform(-1.0, 1.0);
    StateVector psi0 = random_input_state(2, rng);
    DensityMatrix sigma = DensityMatrix::from_pure(random_input_state(2, rng));
    const double T = 1.0;

    Mat rho0 = DensityMatrix::from_pure(psi0).entries();
    Mat rhoT = evolve_density(h, theta, rho0, 0.0, T, {});
    auto [loss, adj_seed] = stateprep_loss_and_seed(DensityMatrix(rhoT, psi0.dims()), sigma);
    (void)loss;

    GradientEstimate ref = theorem2_gradient(h, theta, psi0, adj_seed, T,
                                             TimeGrid::trapezoid(10001, T),
                                             ShotBudget::exact_budget(), seed);

    for (std::size_t n : {11u, 21u, 41u, 81u, 161u}) {
        GradientEstimate est = theorem2_gradient(h, theta, psi0, adj_seed, T,
                                                 TimeGrid::trapezoid(n, T),
                                                 ShotBudget::exact_budget(), seed);
        double err = 0.0;
        for (std::size_t m = 0; m < est.values.size(); ++m)
            err = std::max(err, std::abs(est.values[m] - ref.values[m]));
        report.x.push_back(static_cast<double>(n - 1));  // interval count
        report.y.push_back(err);
    }
    report.slope = fit_loglog_slope(report.x, report.y);
    report.pass = std::abs(report.slope - report.expected) <= report.tolerance;
    return report;
}

} // namespace qnode
