#include "qnode/training.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "qnode/continuous.hpp"
#include "qnode/evolution.hpp"

namespace qnode {

using nlohmann::json;

void adam_step(AdamState& state, std::vector<double>& theta, const std::vector<double>& grad,
               const OptimizerConfig& cfg) {
    if (theta.size() != grad.size()) throw std::invalid_argument("adam_step: size mismatch");
    if (state.m.empty()) {
        state.m.assign(theta.size(), 0.0);
        state.v.assign(theta.size(), 0.0);
    }
    ++state.t;
    const double b1t = 1.0 - std::pow(cfg.beta1, double(state.t));
    const double b2t = 1.0 - std::pow(cfg.beta2, double(state.t));
    for (std::size_t i = 0; i < theta.size(); ++i) {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        const double mhat = state.m[i] / b1t;
        const double vhat = state.v[i] / b2t;
        theta[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
}

void sgd_step(std::vector<double>& theta, const std::vector<double>& grad, double lr) {
    if (theta.size() != grad.size()) throw std::invalid_argument("sgd_step: size mismatch");
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= lr * grad[i];
}

double TimeDistribution::sample(RngStream& rng) const {
    return fixed ? value : rng.uniform(lo, hi);
}

namespace {

StateVector plus_state(int sites) {
    Vec v = Vec::Ones(1);
    for (int q = 0; q < sites; ++q) v = kron(v, ket_plus());
    return StateVector(std::move(v), std::vector<Index>(sites, 2));
}

TimeGrid make_grid(const ExperimentConfig& cfg, double T, RngStream& rng) {
    const auto n = std::max<std::size_t>(1, std::size_t(std::llround(T / cfg.delta_s)));
    if (cfg.grid_rule == "trapezoid") return TimeGrid::trapezoid(n + 1, T);
    if (cfg.grid_rule == "midpoint") return TimeGrid::midpoint(n, T);
    if (cfg.grid_rule == "uniform-random") return TimeGrid::uniform_random(n, T, rng);
    throw std::invalid_argument("unknown grid rule: " + cfg.grid_rule);
}

struct ModelBundle {
    ParametricHamiltonian h;
    std::vector<double> theta_star;
};

ModelBundle build_model(const ExperimentConfig& cfg) {
    RngStream model_rng(derive_seed(cfg.seed, {10}));
    if (cfg.model == "single-qubit") return {builtin_single_qubit(), {0.0, M_PI / 4, 0.0}};
    if (cfg.model == "hydrogen") {
        BuiltinModel b = builtin_hydrogen_ansatz();
        return {std::move(b.hamiltonian), std::move(b.theta_star.values)};
    }
    if (cfg.model == "ising") {
        BuiltinModel b = builtin_ising(cfg.sites, model_rng);
        return {std::move(b.hamiltonian), std::move(b.theta_star.values)};
    }
    if (cfg.model == "td-ising") {
        BuiltinModel b = builtin_td_ising(cfg.sites, cfg.network_width, model_rng);
        return {std::move(b.hamiltonian), std::move(b.theta_star.values)};
    }
    throw std::invalid_argument("unknown model: " + cfg.model);
}

std::vector<double> initial_parameters(const ExperimentConfig& cfg, std::size_t m) {
    if (!cfg.theta_init.empty()) {
        if (cfg.theta_init.size() != m)
            throw std::invalid_argument("theta_init length does not match the model");
        return cfg.theta_init;
    }
    RngStream rng(derive_seed(cfg.seed, {0}));
    std::vector<double> theta(m);
    for (double& t : theta) t = rng.uniform(cfg.init_lo, cfg.init_hi);
    return theta;
}

void check_finite(double loss, const std::vector<double>& grad, long iter) {
    bool bad = !std::isfinite(loss);
    for (double g : grad) bad = bad || !std::isfinite(g);
    if (bad)
        throw std::runtime_error("train: non-finite loss or gradient at iteration " +
                                 std::to_string(iter));
}

void optimizer_update(const ExperimentConfig& cfg, AdamState& adam, std::vector<double>& theta,
                      std::vector<double> grad) {
    if (cfg.gradient_normalisation) {
        double n = 0.0;
        for (double g : grad) n += g * g;
        n = std::sqrt(n);
        if (n > 0.0)
            for (double& g : grad) g /= n;
    }
    if (cfg.optimizer.kind == OptimizerConfig::Kind::Adam)
        adam_step(adam, theta, grad, cfg.optimizer);
    else
        sgd_step(theta, grad, cfg.optimizer.lr);
}

double grad_norm(const std::vector<double>& g) {
    double n = 0.0;
    for (double v : g) n += v * v;
    return std::sqrt(n);
}

void train_state_prep(const ExperimentConfig& cfg, TrainingRun& run) {
    const ParametricHamiltonian h = builtin_single_qubit();
    std::vector<double> theta = initial_parameters(cfg, h.num_parameters());
    const StateVector psi0 = cfg.initial_state == "plus" ? plus_state(1)
                                                         : StateVector(ket0(), {2});
    const DensityMatrix sigma = DensityMatrix::from_pure(plus_state(1));
    const double T = cfg.time.value;
    AdamState adam;

    for (long iter = 0; iter < cfg.iterations; ++iter) {
        RngStream grid_rng(derive_seed(cfg.seed, {1, std::uint64_t(iter)}));
        const TimeGrid grid = make_grid(cfg, T, grid_rng);
        const Vec vT = evolve_state(h, theta, psi0.amplitudes(), 0.0, T);
        const auto [loss, seed] =
            stateprep_loss_and_seed(DensityMatrix::from_pure(StateVector(vT, psi0.dims())),
                                    sigma);
        const GradientEstimate g =
            theorem2_gradient(h, theta, psi0, seed, T, grid, ShotBudget{cfg.shots},
                              derive_seed(cfg.seed, {2, std::uint64_t(iter)}));
        check_finite(loss, g.values, iter);
        run.records.push_back({iter, loss, loss, grad_norm(g.values), cfg.shots});
        optimizer_update(cfg, adam, theta, g.values);
    }
    run.final_theta = theta;
    run.theta_star = {0.0, M_PI / 4, 0.0};
}

void train_ham_or_obs(const ExperimentConfig& cfg, TrainingRun& run) {
    const bool obs = cfg.experiment == "obs-learn";
    ModelBundle mb = build_model(cfg);
    const ParametricHamiltonian& h = mb.h;
    const int sites = cfg.model == "single-qubit" ? 1
                      : cfg.model == "hydrogen"   ? 2
                                                  : cfg.sites;
    std::vector<double> theta = initial_parameters(cfg, h.num_parameters());
    AdamState adam;
    double last_te = 0.0;
    const char axes[] = {'X', 'Y', 'Z'};

    for (long iter = 0; iter < cfg.iterations; ++iter) {
        RngStream data_rng(derive_seed(cfg.seed, {1, std::uint64_t(iter)}));
        const std::vector<HamLearnSample> batch = generate_hamlearn_dataset(
            h, mb.theta_star, sites, cfg.batch_size, cfg.time, cfg.initial_state == "random",
            data_rng);

        double loss = 0.0;
        std::vector<GradientEstimate> parts;
        for (std::size_t b = 0; b < batch.size(); ++b) {
            const HamLearnSample& sample = batch[b];
            RngStream grid_rng(derive_seed(cfg.seed, {4, std::uint64_t(iter), b}));
            const TimeGrid grid = make_grid(cfg, sample.T, grid_rng);
            const Vec vT = evolve_state(h, theta, sample.rho0.amplitudes(), 0.0, sample.T);
            const DensityMatrix rhoT = DensityMatrix::from_pure(StateVector(vT, sample.rho0.dims()));

            AdjointSeed seed;
            if (obs) {
                std::vector<ObservableRecord> records;
                for (int q = 0; q < sites; ++q) {
                    std::string label(std::size_t(sites), 'I');
                    label[std::size_t(q)] = axes[data_rng.below(3)];
                    ObservableRecord rec;
                    rec.observable = PauliString::from_label(label);
                    rec.value = expectation(rec.observable.dense(), sample.sigma.entries());
                    rec.state_id = b;
                    rec.T = sample.T;
                    records.push_back(std::move(rec));
                }
                const double w = 1.0 / double(batch.size() * records.size());
                auto [l, s] = observable_loss_and_seed(records, rhoT, w);
                loss += l;
                seed = std::move(s);
            } else {
                auto [l, seeds] = hamlearn_loss_and_seeds({rhoT}, {sample.sigma});
                loss += l / double(batch.size());
                seed = std::move(seeds.front());
                seed.components.front().c /= double(batch.size());
            }
            parts.push_back(theorem2_gradient(
                h, theta, sample.rho0, seed, sample.T, grid, ShotBudget{cfg.shots},
                derive_seed(cfg.seed, {2, std::uint64_t(iter), b})));
        }
        const GradientEstimate g =
            combine_corollary1(parts, std::vector<double>(parts.size(), 1.0));
        check_finite(loss, g.values, iter);

        if (iter % cfg.record_every == 0 || iter + 1 == cfg.iterations) {
            RngStream te_rng(derive_seed(cfg.seed, {3, std::uint64_t(iter)}));
            last_te = test_error(h, theta, h, mb.theta_star, sites, cfg.test_error_samples,
                                 cfg.time, te_rng);
        }
        run.records.push_back({iter, loss, last_te, grad_norm(g.values), cfg.shots});
        optimizer_update(cfg, adam, theta, g.values);
    }
    run.final_theta = theta;
    run.theta_star = mb.theta_star;
}

void train_ode(const ExperimentConfig& cfg, TrainingRun& run) {
    const LinearSystem sys = builtin_decay();
    const XiRegister xi = XiRegister::make(cfg.n_xi, cfg.l_xi);
    const ParametricHamiltonian h = dilate(sys, xi);
    Vec u0(2);
    u0 << 1.0, 1.0;
    u0 /= u0.norm();
    const double T = cfg.time.value;
    const std::vector<CollocationRecord> records = decay_records(cfg.target_value, u0, T);
    const StateVector v0 = dilated_initial(u0, xi);

    std::vector<double> theta = initial_parameters(cfg, h.num_parameters());
    AdamState adam;

    for (long iter = 0; iter < cfg.iterations; ++iter) {
        RngStream grid_rng(derive_seed(cfg.seed, {1, std::uint64_t(iter)}));
        const TimeGrid grid = make_grid(cfg, T, grid_rng);
        const FastEvolver fast(h, theta);
        Vec vT = v0.amplitudes();
        fast.apply(vT, 0.0, T);
        const StateVector v_T(std::move(vT), v0.dims());
        const auto [loss, seed] = ode_loss_and_seed(records, v_T, xi);
        const GradientEstimate g =
            theorem2_gradient(h, theta, v0, seed, T, grid, ShotBudget{cfg.shots},
                              derive_seed(cfg.seed, {2, std::uint64_t(iter)}));
        check_finite(loss, g.values, iter);
        run.records.push_back(
            {iter, loss, std::abs(theta[0] - cfg.target_value), grad_norm(g.values), cfg.shots});
        optimizer_update(cfg, adam, theta, g.values);
    }
    run.final_theta = theta;
    run.theta_star = {cfg.target_value};
}

} // namespace

ParametricHamiltonian builtin_single_qubit() {
    std::vector<HamiltonianTerm> terms;
    const char* labels[] = {"X", "Y", "Z"};
    const Mat paulis[] = {pauli_x(), pauli_y(), pauli_z()};
    for (std::size_t i = 0; i < 3; ++i) {
        Schedule s;
        s.kind = Schedule::Kind::Constant;
        s.theta_index = i;
        terms.push_back({HermitianObservable(paulis[i], {2}), s, labels[i]});
    }
    return ParametricHamiltonian(std::move(terms), 3);
}

std::vector<HamLearnSample> generate_hamlearn_dataset(const ParametricHamiltonian& target,
                                                      std::span<const double> theta_star,
                                                      int sites, std::size_t batch,
                                                      const TimeDistribution& tdist,
                                                      bool random_states, RngStream& rng) {
    std::vector<HamLearnSample> out;
    for (std::size_t b = 0; b < batch; ++b) {
        StateVector rho0 = random_states ? random_input_state(sites, rng) : plus_state(sites);
        const double T = tdist.sample(rng);
        const Vec vT = evolve_state(target, theta_star, rho0.amplitudes(), 0.0, T);
        DensityMatrix sigma = DensityMatrix::from_pure(StateVector(vT, rho0.dims()));
        out.push_back({std::move(rho0), T, std::move(sigma)});
    }
    return out;
}

double test_error(const ParametricHamiltonian& ansatz, std::span<const double> theta,
                  const ParametricHamiltonian& target, std::span<const double> theta_star,
                  int sites, std::size_t m_samples, const TimeDistribution& tdist,
                  RngStream& rng) {
    if (m_samples < 1) throw std::invalid_argument("test_error: need >= 1 sample");
    double err = 0.0;
    for (std::size_t i = 0; i < m_samples; ++i) {
        const StateVector phi = random_input_state(sites, rng);
        const double T = tdist.sample(rng);
        const Vec va = evolve_state(ansatz, theta, phi.amplitudes(), 0.0, T);
        const Vec vt = evolve_state(target, theta_star, phi.amplitudes(), 0.0, T);
        err += 1.0 - std::norm(va.dot(vt));
    }
    return err / double(m_samples);
}

TrainingRun train(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    TrainingRun run;
    if (cfg.experiment == "state-prep")
        train_state_prep(cfg, run);
    else if (cfg.experiment == "ham-learn" || cfg.experiment == "obs-learn")
        train_ham_or_obs(cfg, run);
    else if (cfg.experiment == "ode-learn")
        train_ode(cfg, run);
    else
        throw std::invalid_argument("unknown experiment: " + cfg.experiment);
    run.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                      .count();
    return run;
}

namespace {

json time_to_json(const TimeDistribution& t) {
    if (t.fixed) return json{{"type", "fixed"}, {"value", t.value}};
    return json{{"type", "uniform"}, {"lo", t.lo}, {"hi", t.hi}};
}

TimeDistribution time_from_json(const json& j) {
    TimeDistribution t;
    if (!j.is_object()) return t;
    const std::string type = j.value("type", "fixed");
    if (type == "fixed") {
        t.fixed = true;
        t.value = j.value("value", 1.0);
    } else if (type == "uniform") {
        t.fixed = false;
        t.lo = j.value("lo", 1.0);
        t.hi = j.value("hi", 2.0);
    } else {
        throw std::invalid_argument("unknown time distribution: " + type);
    }
    return t;
}

} // namespace

ExperimentConfig ExperimentConfig::from_json_string(const std::string& text) {
    const json j = json::parse(text);
    ExperimentConfig c;
    c.experiment = j.value("experiment", c.experiment);
    c.model = j.value("model", c.model);
    c.sites = j.value("sites", c.sites);
    c.network_width = j.value("network_width", c.network_width);
    c.iterations = j.value("iterations", c.iterations);
    c.seed = j.value("seed", c.seed);
    if (j.contains("shots")) {
        if (j["shots"].is_string()) {
            if (j["shots"] != "inf") throw std::invalid_argument("shots must be an int or \"inf\"");
            c.shots = 0;
        } else {
            c.shots = j["shots"].get<long>();
            if (c.shots < 1) throw std::invalid_argument("shots must be >= 1 or \"inf\"");
        }
    }
    if (j.contains("optimizer")) {
        const json& o = j["optimizer"];
        const std::string kind = o.value("type", "adam");
        if (kind == "adam")
            c.optimizer.kind = OptimizerConfig::Kind::Adam;
        else if (kind == "sgd")
            c.optimizer.kind = OptimizerConfig::Kind::Sgd;
        else
            throw std::invalid_argument("unknown optimizer: " + kind);
        c.optimizer.lr = o.value("lr", c.optimizer.lr);
    }
    if (j.contains("grid")) {
        c.grid_rule = j["grid"].value("rule", c.grid_rule);
        c.delta_s = j["grid"].value("delta_s", c.delta_s);
    }
    c.batch_size = j.value("batch_size", c.batch_size);
    if (j.contains("time")) c.time = time_from_json(j["time"]);
    c.initial_state = j.value("initial_state", c.initial_state);
    c.record_every = j.value("record_every", c.record_every);
    c.test_error_samples = j.value("test_error_samples", c.test_error_samples);
    c.gradient_normalisation = j.value("gradient_normalisation", c.gradient_normalisation);
    if (j.contains("theta_init")) c.theta_init = j["theta_init"].get<std::vector<double>>();
    c.init_lo = j.value("init_lo", c.init_lo);
    c.init_hi = j.value("init_hi", c.init_hi);
    c.n_xi = j.value("n_xi", c.n_xi);
    c.l_xi = j.value("l_xi", c.l_xi);
    c.target_value = j.value("target_value", c.target_value);
    return c;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_string(ss.str());
}

std::string ExperimentConfig::to_json_string() const {
    json j;
    j["experiment"] = experiment;
    j["model"] = model;
    j["sites"] = sites;
    j["network_width"] = network_width;
    j["iterations"] = iterations;
    j["seed"] = seed;
    if (shots <= 0)
        j["shots"] = "inf";
    else
        j["shots"] = shots;
    j["optimizer"] = {{"type", optimizer.kind == OptimizerConfig::Kind::Adam ? "adam" : "sgd"},
                      {"lr", optimizer.lr}};
    j["grid"] = {{"rule", grid_rule}, {"delta_s", delta_s}};
    j["batch_size"] = batch_size;
    j["time"] = time_to_json(time);
    j["initial_state"] = initial_state;
    j["record_every"] = record_every;
    j["test_error_samples"] = test_error_samples;
    j["gradient_normalisation"] = gradient_normalisation;
    if (!theta_init.empty()) j["theta_init"] = theta_init;
    j["init_lo"] = init_lo;
    j["init_hi"] = init_hi;
    j["n_xi"] = n_xi;
    j["l_xi"] = l_xi;
    j["target_value"] = target_value;
    return j.dump(2);
}

void write_csv(const TrainingRun& run, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << "iteration,loss,test_error,grad_norm,shots,elapsed_ms\n";
    out.precision(17);
    for (const IterationRecord& r : run.records)
        out << r.iteration << ',' << r.loss << ',' << r.test_error << ',' << r.grad_norm << ','
            << r.shots << ",0\n";
}

void write_summary_json(const TrainingRun& run, const ExperimentConfig& cfg,
                        const std::string& path) {
    json j;
    j["config"] = json::parse(cfg.to_json_string());
    j["final_theta"] = run.final_theta;
    if (!run.theta_star.empty()) j["theta_star"] = run.theta_star;
    j["iterations"] = run.records.size();
    if (!run.records.empty()) {
        j["final_loss"] = run.records.back().loss;
        j["final_test_error"] = run.records.back().test_error;
    }
    j["wall_ms"] = run.wall_ms;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << j.dump(2) << '\n';
}

} // namespace qnode
