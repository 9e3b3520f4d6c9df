#pragma once

#include <string>

#include "qnode/adjoint.hpp"
#include "qnode/losses.hpp"
#include "qnode/schrodinger.hpp"

namespace qnode {

struct OptimizerConfig {
    enum class Kind { Sgd, Adam };
    Kind kind = Kind::Adam;
    double lr = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<double> m, v;
    long t = 0;
};

void adam_step(AdamState& state, std::vector<double>& theta, const std::vector<double>& grad,
               const OptimizerConfig& cfg);
void sgd_step(std::vector<double>& theta, const std::vector<double>& grad, double lr);

struct TimeDistribution {
    bool fixed = true;
    double value = 1.0;
    double lo = 1.0, hi = 2.0;
    double sample(RngStream& rng) const;
};

struct HamLearnSample {
    StateVector rho0;
    double T;
    DensityMatrix sigma;  // target-evolved state
};

std::vector<HamLearnSample> generate_hamlearn_dataset(const ParametricHamiltonian& target,
                                                      std::span<const double> theta_star,
                                                      int sites, std::size_t batch,
                                                      const TimeDistribution& tdist,
                                                      bool random_states, RngStream& rng);

// Mean infidelity 1 - |<phi| U_ansatz(0,T)^t U_target(0,T) |phi>|^2 over
// random probe states and times.
double test_error(const ParametricHamiltonian& ansatz, std::span<const double> theta,
                  const ParametricHamiltonian& target, std::span<const double> theta_star,
                  int sites, std::size_t m_samples, const TimeDistribution& tdist,
                  RngStream& rng);

struct ExperimentConfig {
    std::string experiment = "state-prep";  // state-prep | ham-learn | obs-learn | ode-learn
    std::string model = "single-qubit";     // single-qubit | hydrogen | ising | td-ising | decay
    int sites = 2;
    int network_width = 2;
    long iterations = 100;
    std::uint64_t seed = 1;
    long shots = 0;  // 0 = exact
    OptimizerConfig optimizer;
    std::string grid_rule = "trapezoid";
    double delta_s = 0.1;
    std::size_t batch_size = 1;
    TimeDistribution time;
    std::string initial_state = "plus";  // plus | zero | random
    long record_every = 1;
    std::size_t test_error_samples = 50;
    bool gradient_normalisation = false;
    std::vector<double> theta_init;  // empty: uniform in [init_lo, init_hi]
    double init_lo = -1.0, init_hi = 1.0;
    std::size_t n_xi = 512;
    double l_xi = 16.0;
    double target_value = 0.7;  // decay rate for ode-learn

    static ExperimentConfig from_json_string(const std::string& text);
    static ExperimentConfig from_json_file(const std::string& path);
    std::string to_json_string() const;
};

struct IterationRecord {
    long iteration = 0;
    double loss = 0.0;
    double test_error = 0.0;
    double grad_norm = 0.0;
    long shots = 0;
};

struct TrainingRun {
    std::vector<IterationRecord> records;
    std::vector<double> final_theta;
    std::vector<double> theta_star;  // empty when no ground truth exists
    double wall_ms = 0.0;
};

TrainingRun train(const ExperimentConfig& cfg);

// CSV columns: iteration,loss,test_error,grad_norm,shots,elapsed_ms. The
// elapsed_ms column is written as 0 so runs with the same seed are
// byte-identical; wall time lives in the JSON summary.
void write_csv(const TrainingRun& run, const std::string& path);
void write_summary_json(const TrainingRun& run, const ExperimentConfig& cfg,
                        const std::string& path);

// The single-qubit ansatz H = theta_1 X + theta_2 Y + theta_3 Z.
ParametricHamiltonian builtin_single_qubit();

} // namespace qnode
