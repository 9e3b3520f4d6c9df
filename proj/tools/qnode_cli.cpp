// Experiment front end. All library functionality is reached through the
// shared-library C API; this translation unit only does argument parsing,
// file plumbing, and replicate fan-out.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qnode/qnode_c.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json default_config(const std::string& experiment) {
    if (experiment == "state-prep") {
        return {
            {"experiment", "state-prep"},
            {"model", "single-qubit"},
            {"iterations", 3000},
            {"shots", "inf"},
            {"optimizer", {{"type", "sgd"}, {"lr", 1e-2}}},
            {"grid", {{"rule", "trapezoid"}, {"delta_s", 0.1}}},
            {"time", {{"type", "fixed"}, {"value", 1.0}}},
            {"initial_state", "zero"},
            {"theta_init", {0.0, 0.0, 0.0}},
            {"record_every", 10},
        };
    }
    if (experiment == "ham-learn") {
        return {
            {"experiment", "ham-learn"},
            {"model", "ising"},
            {"sites", 2},
            {"iterations", 1000},
            {"shots", "inf"},
            {"optimizer", {{"type", "adam"}, {"lr", 1e-2}}},
            {"grid", {{"rule", "trapezoid"}, {"delta_s", 0.1}}},
            {"time", {{"type", "uniform"}, {"lo", 1.0}, {"hi", 2.0}}},
            {"batch_size", 1},
            {"initial_state", "plus"},
            {"record_every", 10},
        };
    }
    if (experiment == "obs-learn") {
        return {
            {"experiment", "obs-learn"},
            {"model", "ising"},
            {"sites", 2},
            {"iterations", 1000},
            {"shots", "inf"},
            {"optimizer", {{"type", "adam"}, {"lr", 8e-3}}},
            {"grid", {{"rule", "trapezoid"}, {"delta_s", 0.1}}},
            {"time", {{"type", "uniform"}, {"lo", 1.0}, {"hi", 2.0}}},
            {"batch_size", 1},
            {"initial_state", "random"},
            {"record_every", 10},
        };
    }
    if (experiment == "ode-learn") {
        return {
            {"experiment", "ode-learn"},
            {"model", "decay"},
            {"iterations", 300},
            {"shots", "inf"},
            {"optimizer", {{"type", "adam"}, {"lr", 5e-2}}},
            {"grid", {{"rule", "trapezoid"}, {"delta_s", 0.1}}},
            {"time", {{"type", "fixed"}, {"value", 1.0}}},
            {"target_value", 0.7},
            {"record_every", 10},
        };
    }
    throw std::runtime_error("no default config for " + experiment);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RunArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::string shots;  // "", positive integer, or "inf"
    std::uint64_t seed = 0;
    bool seed_set = false;
    int replicates = 5;
};

int run_experiment(const std::string& experiment, const RunArgs& args) {
    json cfg = args.config_path.empty() ? default_config(experiment)
                                        : json::parse(read_file(args.config_path));
    cfg["experiment"] = experiment;
    if (!args.shots.empty()) {
        if (args.shots == "inf")
            cfg["shots"] = "inf";
        else
            cfg["shots"] = std::stol(args.shots);
    }
    if (args.seed_set) cfg["seed"] = args.seed;
    const std::uint64_t master = cfg.value("seed", std::uint64_t{1});

    fs::create_directories(args.out_dir);

    std::vector<std::string> errors(args.replicates);
    std::vector<std::thread> workers;
    for (int i = 0; i < args.replicates; ++i) {
        workers.emplace_back([&, i] {
            json rep_cfg = cfg;
            rep_cfg["seed"] = args.replicates == 1
                                  ? master
                                  : qnode_derive_seed(master, static_cast<std::uint64_t>(i));
            const std::string text = rep_cfg.dump();
            qnode_experiment_t* exp = qnode_experiment_create(text.c_str());
            if (!exp) {
                errors[i] = qnode_last_error();
                return;
            }
            const std::string csv = args.out_dir + "/replicate_" + std::to_string(i) + ".csv";
            const std::string summary =
                args.out_dir + "/replicate_" + std::to_string(i) + "_summary.json";
            if (qnode_experiment_run(exp, csv.c_str(), summary.c_str()) != QNODE_OK)
                errors[i] = qnode_last_error();
            qnode_experiment_destroy(exp);
        });
    }
    for (auto& w : workers) w.join();

    bool ok = true;
    for (int i = 0; i < args.replicates; ++i) {
        if (!errors[i].empty()) {
            std::cerr << "replicate " << i << " failed: " << errors[i] << "\n";
            ok = false;
        }
    }
    if (ok)
        std::cout << experiment << ": " << args.replicates << " replicate(s) written to "
                  << args.out_dir << "\n";
    return ok ? 0 : 1;
}

int run_grad_check(std::uint64_t seed, const std::string& out_dir) {
    double vs_oracle = 0.0, vs_fd = 0.0;
    int pass = 0;
    if (qnode_grad_check(seed, &vs_oracle, &vs_fd, &pass) != QNODE_OK) {
        std::cerr << "grad-check failed: " << qnode_last_error() << "\n";
        return 1;
    }
    json report = {
        {"check", "grad-check"},
        {"seed", seed},
        {"max_estimator_vs_oracle", vs_oracle},
        {"max_estimator_vs_finite_difference", vs_fd},
        {"tolerance_oracle", 1e-8},
        {"tolerance_finite_difference", 1e-5},
        {"pass", pass != 0},
    };
    fs::create_directories(out_dir);
    std::ofstream(out_dir + "/grad_check.json") << report.dump(2) << "\n";
    std::cout << report.dump(2) << "\n";
    return pass ? 0 : 1;
}

int run_scaling_study(const std::string& sweep, std::uint64_t seed, const std::string& out_dir) {
    double slope = 0.0, expected = 0.0, tolerance = 0.0;
    int pass = 0;
    if (qnode_scaling_study(sweep.c_str(), seed, &slope, &expected, &tolerance, &pass) !=
        QNODE_OK) {
        std::cerr << "scaling-study failed: " << qnode_last_error() << "\n";
        return 1;
    }
    json report = {
        {"check", "scaling-study"}, {"sweep", sweep},         {"seed", seed},
        {"slope", slope},           {"expected", expected},   {"tolerance", tolerance},
        {"pass", pass != 0},
    };
    fs::create_directories(out_dir);
    std::ofstream(out_dir + "/scaling_" + sweep + ".json") << report.dump(2) << "\n";
    std::cout << report.dump(2) << "\n";
    return pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum neural-ODE experiment runner (v" +
                 std::string(qnode_version()) + ")"};
    app.require_subcommand(1);

    RunArgs args;
    std::string sweep = "shots";

    auto add_common = [&](CLI::App* sub, bool with_replicates) {
        sub->add_option("--config", args.config_path, "JSON config file (defaults built in)");
        sub->add_option("--out", args.out_dir, "output directory");
        sub->add_option("--seed", args.seed, "master seed override")
            ->each([&](const std::string&) { args.seed_set = true; });
        if (with_replicates) {
            sub->add_option("--shots", args.shots, "shot count or 'inf' for exact expectations");
            sub->add_option("--replicates", args.replicates, "independent replicate count")
                ->check(CLI::PositiveNumber);
        }
    };

    for (const char* name : {"state-prep", "ham-learn", "obs-learn", "ode-learn"})
        add_common(app.add_subcommand(name, "run the experiment and write CSV/JSON outputs"),
                   true);
    add_common(app.add_subcommand("grad-check",
                                  "compare the circuit estimator against the commutator-trace "
                                  "oracle and finite differences"),
               false);
    auto* scaling = app.add_subcommand("scaling-study", "fit error-vs-resource log-log slopes");
    add_common(scaling, false);
    scaling->add_option("--sweep", sweep, "'shots' or 'grid'")
        ->check(CLI::IsMember({"shots", "grid"}));

    CLI11_PARSE(app, argc, argv);

    try {
        const std::string sub = app.get_subcommands().front()->get_name();
        const std::uint64_t seed = args.seed_set ? args.seed : 1;
        if (sub == "grad-check") return run_grad_check(seed, args.out_dir);
        if (sub == "scaling-study") return run_scaling_study(sweep, seed, args.out_dir);
        return run_experiment(sub, args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
