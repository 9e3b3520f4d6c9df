#include "qnode/qnode_c.h"

#include <cstring>
#include <exception>
#include <string>

#include "qnode/diagnostics.hpp"
#include "qnode/training.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const char* what) { g_last_error = what ? what : "unknown error"; }
void clear_error() { g_last_error.clear(); }

int classify(const std::exception& e) {
    // I/O failures are reported with the path in the message.
    if (std::strstr(e.what(), "cannot open") || std::strstr(e.what(), "cannot write"))
        return QNODE_IO;
    return QNODE_RUNTIME;
}

} // namespace

struct qnode_experiment {
    qnode::ExperimentConfig cfg;
};

extern "C" {

qnode_experiment_t* qnode_experiment_create(const char* config_json) {
    clear_error();
    if (!config_json) {
        set_error("config_json is null");
        return nullptr;
    }
    try {
        auto* exp = new qnode_experiment;
        exp->cfg = qnode::ExperimentConfig::from_json_string(config_json);
        return exp;
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    }
}

void qnode_experiment_destroy(qnode_experiment_t* exp) { delete exp; }

int qnode_experiment_set_seed(qnode_experiment_t* exp, uint64_t seed) {
    clear_error();
    if (!exp) {
        set_error("experiment handle is null");
        return QNODE_INVALID_ARGUMENT;
    }
    exp->cfg.seed = seed;
    return QNODE_OK;
}

int qnode_experiment_set_shots(qnode_experiment_t* exp, long shots) {
    clear_error();
    if (!exp) {
        set_error("experiment handle is null");
        return QNODE_INVALID_ARGUMENT;
    }
    exp->cfg.shots = shots < 0 ? 0 : shots;
    return QNODE_OK;
}

int qnode_experiment_run(qnode_experiment_t* exp, const char* csv_path,
                         const char* summary_json_path) {
    clear_error();
    if (!exp) {
        set_error("experiment handle is null");
        return QNODE_INVALID_ARGUMENT;
    }
    try {
        qnode::TrainingRun run = qnode::train(exp->cfg);
        if (csv_path) qnode::write_csv(run, csv_path);
        if (summary_json_path) qnode::write_summary_json(run, exp->cfg, summary_json_path);
        return QNODE_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return classify(e);
    }
}

int qnode_grad_check(uint64_t seed, double* max_vs_oracle, double* max_vs_fd, int* pass) {
    clear_error();
    try {
        qnode::GradCheckReport report = qnode::grad_check(seed);
        if (max_vs_oracle) *max_vs_oracle = report.max_estimator_vs_oracle;
        if (max_vs_fd) *max_vs_fd = report.max_vs_finite_difference;
        if (pass) *pass = report.pass ? 1 : 0;
        return QNODE_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return QNODE_RUNTIME;
    }
}

int qnode_scaling_study(const char* sweep, uint64_t seed, double* slope, double* expected,
                        double* tolerance, int* pass) {
    clear_error();
    if (!sweep) {
        set_error("sweep is null");
        return QNODE_INVALID_ARGUMENT;
    }
    try {
        qnode::ScalingReport report;
        if (std::strcmp(sweep, "shots") == 0) {
            report = qnode::shot_scaling_study(seed);
        } else if (std::strcmp(sweep, "grid") == 0) {
            report = qnode::grid_scaling_study(seed);
        } else {
            set_error("sweep must be \"shots\" or \"grid\"");
            return QNODE_INVALID_ARGUMENT;
        }
        if (slope) *slope = report.slope;
        if (expected) *expected = report.expected;
        if (tolerance) *tolerance = report.tolerance;
        if (pass) *pass = report.pass ? 1 : 0;
        return QNODE_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return QNODE_RUNTIME;
    }
}

uint64_t qnode_derive_seed(uint64_t master, uint64_t stream) {
    return qnode::derive_seed(master, {stream});
}

const char* qnode_last_error(void) { return g_last_error.c_str(); }

const char* qnode_version(void) { return "0.1.0"; }

} // extern "C"
