#include "qnode/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qnode {

namespace {

std::size_t piece_at(const std::vector<double>& breakpoints, double t) {
    // Right-open pieces; t >= last breakpoint falls into the final piece.
    const std::size_t pieces = breakpoints.size() - 1;
    for (std::size_t j = 0; j + 1 < pieces; ++j)
        if (t < breakpoints[j + 1]) return j;
    return pieces - 1;
}

} // namespace

double Schedule::value(double t, std::span<const double> theta) const {
    switch (kind) {
        case Kind::Fixed: return fixed_value;
        case Kind::FixedSinusoid: return fixed_value * std::sin(fixed_freq * t);
        case Kind::Constant: return theta[theta_index];
        case Kind::PiecewiseConstant: return theta[piece_indices[piece_at(breakpoints, t)]];
        case Kind::Fourier: {
            double v = 0.0;
            for (std::size_t n = 0; n < cos_indices.size(); ++n)
                v += theta[cos_indices[n]] * std::cos(double(n + 1) * omega * t);
            for (std::size_t n = 0; n < sin_indices.size(); ++n)
                v += theta[sin_indices[n]] * std::sin(double(n + 1) * omega * t);
            return v;
        }
        case Kind::SinusoidalNetwork: {
            double v = theta[bias_idx];
            for (std::size_t k = 0; k < w1_idx.size(); ++k)
                v += theta[w2_idx[k]] * std::sin(theta[w1_idx[k]] * t + theta[b_idx[k]]);
            return v;
        }
    }
    throw std::logic_error("Schedule::value: bad kind");
}

void Schedule::add_grad(double t, std::span<const double> theta, double scale,
                        std::span<double> grad) const {
    switch (kind) {
        case Kind::Fixed:
        case Kind::FixedSinusoid: return;
        case Kind::Constant: grad[theta_index] += scale; return;
        case Kind::PiecewiseConstant:
            grad[piece_indices[piece_at(breakpoints, t)]] += scale;
            return;
        case Kind::Fourier:
            for (std::size_t n = 0; n < cos_indices.size(); ++n)
                grad[cos_indices[n]] += scale * std::cos(double(n + 1) * omega * t);
            for (std::size_t n = 0; n < sin_indices.size(); ++n)
                grad[sin_indices[n]] += scale * std::sin(double(n + 1) * omega * t);
            return;
        case Kind::SinusoidalNetwork: {
            grad[bias_idx] += scale;
            for (std::size_t k = 0; k < w1_idx.size(); ++k) {
                const double w2 = theta[w2_idx[k]];
                const double phase = theta[w1_idx[k]] * t + theta[b_idx[k]];
                grad[w1_idx[k]] += scale * w2 * std::cos(phase) * t;
                grad[b_idx[k]] += scale * w2 * std::cos(phase);
                grad[w2_idx[k]] += scale * std::sin(phase);
            }
            return;
        }
    }
    throw std::logic_error("Schedule::add_grad: bad kind");
}

double Schedule::time_derivative(double t, std::span<const double> theta) const {
    switch (kind) {
        case Kind::Fixed:
        case Kind::Constant:
        case Kind::PiecewiseConstant: return 0.0;
        case Kind::FixedSinusoid: return fixed_value * fixed_freq * std::cos(fixed_freq * t);
        case Kind::Fourier: {
            double v = 0.0;
            for (std::size_t n = 0; n < cos_indices.size(); ++n)
                v -= theta[cos_indices[n]] * double(n + 1) * omega *
                     std::sin(double(n + 1) * omega * t);
            for (std::size_t n = 0; n < sin_indices.size(); ++n)
                v += theta[sin_indices[n]] * double(n + 1) * omega *
                     std::cos(double(n + 1) * omega * t);
            return v;
        }
        case Kind::SinusoidalNetwork: {
            double v = 0.0;
            for (std::size_t k = 0; k < w1_idx.size(); ++k)
                v += theta[w2_idx[k]] * theta[w1_idx[k]] *
                     std::cos(theta[w1_idx[k]] * t + theta[b_idx[k]]);
            return v;
        }
    }
    throw std::logic_error("Schedule::time_derivative: bad kind");
}

bool Schedule::depends_on_theta() const {
    return kind != Kind::Fixed && kind != Kind::FixedSinusoid;
}

bool Schedule::depends_on_time() const {
    return kind == Kind::FixedSinusoid || kind == Kind::PiecewiseConstant ||
           kind == Kind::Fourier || kind == Kind::SinusoidalNetwork;
}

ParametricHamiltonian::ParametricHamiltonian(std::vector<HamiltonianTerm> terms,
                                             std::size_t num_parameters)
    : terms_(std::move(terms)), num_params_(num_parameters) {
    if (terms_.empty()) throw std::invalid_argument("ParametricHamiltonian: no terms");
    for (const auto& t : terms_)
        if (t.op.dim() != terms_.front().op.dim())
            throw std::invalid_argument("ParametricHamiltonian: term dimension mismatch");
}

bool ParametricHamiltonian::is_time_independent() const {
    return std::none_of(terms_.begin(), terms_.end(),
                        [](const HamiltonianTerm& t) { return t.schedule.depends_on_time(); });
}

Mat ParametricHamiltonian::dense(double t, std::span<const double> theta) const {
    Mat h = Mat::Zero(dim(), dim());
    for (const auto& term : terms_) h += term.schedule.value(t, theta) * term.op.entries();
    return h;
}

Mat ParametricHamiltonian::parameter_derivative(double t, std::span<const double> theta,
                                                std::size_t m) const {
    Mat h = Mat::Zero(dim(), dim());
    std::vector<double> g(num_params_);
    for (const auto& term : terms_) {
        if (!term.schedule.depends_on_theta()) continue;
        std::fill(g.begin(), g.end(), 0.0);
        term.schedule.add_grad(t, theta, 1.0, g);
        if (g[m] != 0.0) h += g[m] * term.op.entries();
    }
    return h;
}

double ParametricHamiltonian::coefficient(std::size_t k, double t,
                                          std::span<const double> theta) const {
    return terms_[k].schedule.value(t, theta);
}

namespace {

HermitianObservable pauli_obs(const std::string& label) {
    PauliString p = PauliString::from_label(label);
    return HermitianObservable(p.dense(), std::vector<Index>(label.size(), 2));
}

std::string bond_label(int sites, int i, char letter) {
    std::string s(sites, 'I');
    s[i] = letter;
    s[i + 1] = letter;
    return s;
}

std::string site_label(int sites, int i, char letter) {
    std::string s(sites, 'I');
    s[i] = letter;
    return s;
}

double random_coupling(RngStream& rng) {
    // |x| in [0.08, 0.5], sign uniform.
    const double mag = rng.uniform(0.08, 0.5);
    return rng.uniform() < 0.5 ? -mag : mag;
}

} // namespace

ParametricHamiltonian builtin_hydrogen() {
    std::vector<HamiltonianTerm> terms;
    auto fixed = [](double v) {
        Schedule s;
        s.kind = Schedule::Kind::Fixed;
        s.fixed_value = v;
        return s;
    };
    terms.push_back({pauli_obs("ZI"), fixed(0.397936), "ZI"});
    terms.push_back({pauli_obs("IZ"), fixed(0.397936), "IZ"});
    terms.push_back({pauli_obs("ZZ"), fixed(0.011280), "ZZ"});
    terms.push_back({pauli_obs("XX"), fixed(0.180931), "XX"});
    return ParametricHamiltonian(std::move(terms), 0);
}

BuiltinModel builtin_hydrogen_ansatz() {
    const char* labels[] = {"ZI", "IZ", "ZZ", "XX"};
    const double values[] = {0.397936, 0.397936, 0.011280, 0.180931};
    std::vector<HamiltonianTerm> terms;
    Theta star;
    for (std::size_t i = 0; i < 4; ++i) {
        Schedule s;
        s.kind = Schedule::Kind::Constant;
        s.theta_index = i;
        terms.push_back({pauli_obs(labels[i]), s, labels[i]});
        star.values.push_back(values[i]);
        star.names.push_back(labels[i]);
    }
    return {ParametricHamiltonian(std::move(terms), 4), std::move(star)};
}

BuiltinModel builtin_ising(int sites, RngStream& rng) {
    if (sites < 2) throw std::invalid_argument("builtin_ising: need >= 2 sites");
    std::vector<HamiltonianTerm> terms;
    Theta star;
    for (int i = 0; i + 1 < sites; ++i) {
        Schedule s;
        s.kind = Schedule::Kind::Constant;
        s.theta_index = std::size_t(i);
        const std::string label = bond_label(sites, i, 'Z');
        terms.push_back({pauli_obs(label), s, label});
        star.values.push_back(random_coupling(rng));
        star.names.push_back("x" + std::to_string(i));
    }
    return {ParametricHamiltonian(std::move(terms), std::size_t(sites - 1)), std::move(star)};
}

BuiltinModel builtin_td_ising(int sites, int width, RngStream& rng) {
    if (sites < 2) throw std::invalid_argument("builtin_td_ising: need >= 2 sites");
    if (width < 1) throw std::invalid_argument("builtin_td_ising: need width >= 1");
    std::vector<HamiltonianTerm> terms;
    Theta star;
    for (int i = 0; i + 1 < sites; ++i) {
        Schedule s;
        s.kind = Schedule::Kind::Constant;
        s.theta_index = std::size_t(i);
        const std::string label = bond_label(sites, i, 'Z');
        terms.push_back({pauli_obs(label), s, label});
        star.values.push_back(random_coupling(rng));
        star.names.push_back("x" + std::to_string(i));
    }

    // Drive coefficient: network of width `width`, true value sin(pi t).
    Schedule net;
    net.kind = Schedule::Kind::SinusoidalNetwork;
    const std::size_t base = std::size_t(sites - 1);
    const std::size_t m = std::size_t(width);
    for (std::size_t k = 0; k < m; ++k) net.w1_idx.push_back(base + k);
    for (std::size_t k = 0; k < m; ++k) net.b_idx.push_back(base + m + k);
    for (std::size_t k = 0; k < m; ++k) net.w2_idx.push_back(base + 2 * m + k);
    net.bias_idx = base + 3 * m;

    Mat drive = Mat::Zero(Index(1) << sites, Index(1) << sites);
    for (int i = 0; i < sites; ++i) drive += pauli_obs(site_label(sites, i, 'X')).entries();
    terms.push_back({HermitianObservable(std::move(drive), std::vector<Index>(sites, 2)), net,
                     "drive"});

    for (std::size_t k = 0; k < m; ++k) {
        star.values.push_back(k == 0 ? M_PI : 0.0);
        star.names.push_back("w1_" + std::to_string(k));
    }
    for (std::size_t k = 0; k < m; ++k) {
        star.values.push_back(0.0);
        star.names.push_back("b_" + std::to_string(k));
    }
    for (std::size_t k = 0; k < m; ++k) {
        star.values.push_back(k == 0 ? 1.0 : 0.0);
        star.names.push_back("w2_" + std::to_string(k));
    }
    star.values.push_back(0.0);
    star.names.push_back("bias");

    return {ParametricHamiltonian(std::move(terms), base + 3 * m + 1), std::move(star)};
}

Theta initial_theta(const ParametricHamiltonian& h, RngStream& rng, double lo, double hi) {
    Theta t;
    for (std::size_t i = 0; i < h.num_parameters(); ++i) {
        t.values.push_back(rng.uniform(lo, hi));
        t.names.push_back("theta" + std::to_string(i));
    }
    return t;
}

} // namespace qnode
