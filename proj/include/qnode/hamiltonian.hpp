#pragma once

#include <span>
#include <string>
#include <vector>

#include "qnode/core.hpp"

namespace qnode {

// Time/parameter-dependent scalar coefficient f_k(t, theta). Each schedule owns
// the global parameter indices it reads, so a Hamiltonian's gradient layout is
// fixed by its schedules alone.
struct Schedule {
    enum class Kind {
        Fixed,              // constant, no parameters
        FixedSinusoid,      // fixed_value * sin(fixed_freq * t), no parameters
        Constant,           // theta[theta_index]
        PiecewiseConstant,  // theta[piece_indices[j]] on [breakpoints[j], breakpoints[j+1])
        Fourier,            // sum_n a_n cos(n w t) + b_n sin(n w t)
        SinusoidalNetwork,  // sum_k w2_k sin(w1_k t + b_k) + bias
    };

    Kind kind = Kind::Fixed;

    double fixed_value = 0.0;
    double fixed_freq = 0.0;

    std::size_t theta_index = 0;

    std::vector<double> breakpoints;         // size P+1, covers [0, T]
    std::vector<std::size_t> piece_indices;  // size P

    double omega = 0.0;
    std::vector<std::size_t> cos_indices;  // a_1..a_N
    std::vector<std::size_t> sin_indices;  // b_1..b_N

    std::vector<std::size_t> w1_idx, b_idx, w2_idx;  // width m each
    std::size_t bias_idx = 0;

    double value(double t, std::span<const double> theta) const;
    // Accumulate scale * df/dtheta into grad (size = total parameter count).
    void add_grad(double t, std::span<const double> theta, double scale,
                  std::span<double> grad) const;
    double time_derivative(double t, std::span<const double> theta) const;
    bool depends_on_theta() const;
    bool depends_on_time() const;
};

struct HamiltonianTerm {
    HermitianObservable op;  // H_k, theta-independent
    Schedule schedule;       // f_k(t, theta)
    std::string label;
};

// H(t, theta) = sum_k f_k(t, theta) H_k on a fixed tensor-product space.
class ParametricHamiltonian {
  public:
    ParametricHamiltonian(std::vector<HamiltonianTerm> terms, std::size_t num_parameters);

    const std::vector<HamiltonianTerm>& terms() const { return terms_; }
    std::size_t num_parameters() const { return num_params_; }
    Index dim() const { return terms_.front().op.dim(); }
    const std::vector<Index>& dims() const { return terms_.front().op.dims(); }
    bool is_time_independent() const;

    Mat dense(double t, std::span<const double> theta) const;
    // d H / d theta_m at (t, theta); sum over terms of (df_k/dtheta_m) H_k.
    Mat parameter_derivative(double t, std::span<const double> theta, std::size_t m) const;
    double coefficient(std::size_t k, double t, std::span<const double> theta) const;

  private:
    std::vector<HamiltonianTerm> terms_;
    std::size_t num_params_;
};

// Parameter vector plus a human-readable name per entry.
struct Theta {
    std::vector<double> values;
    std::vector<std::string> names;
};

struct BuiltinModel {
    ParametricHamiltonian hamiltonian;
    Theta theta_star;  // ground-truth parameters where applicable
};

// Two-site molecular model: fixed coefficients on Z1, Z2, ZZ, XX.
ParametricHamiltonian builtin_hydrogen();

// Same four terms with one learnable coefficient each; theta_star holds the
// fixed-model values.
BuiltinModel builtin_hydrogen_ansatz();

// Transverse-field-free Ising chain: sum_i x_i Z_i Z_{i+1}, one parameter per bond.
BuiltinModel builtin_ising(int sites, RngStream& rng);

// Ising couplings plus a sin(pi t) transverse drive; the learnable drive
// coefficient is a sinusoidal network of width m.
BuiltinModel builtin_td_ising(int sites, int width, RngStream& rng);

Theta initial_theta(const ParametricHamiltonian& h, RngStream& rng, double lo = -1.0,
                    double hi = 1.0);

} // namespace qnode
