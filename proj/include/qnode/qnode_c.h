#ifndef QNODE_C_H
#define QNODE_C_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define QNODE_OK 0
#define QNODE_INVALID_ARGUMENT 1
#define QNODE_RUNTIME 2
#define QNODE_IO 3

typedef struct qnode_experiment qnode_experiment_t;

/* Builds an experiment from a JSON config string. Returns NULL on invalid
 * config; qnode_last_error() holds the diagnostic. */
qnode_experiment_t* qnode_experiment_create(const char* config_json);
void qnode_experiment_destroy(qnode_experiment_t* exp);

int qnode_experiment_set_seed(qnode_experiment_t* exp, uint64_t seed);
/* shots < 0 selects exact expectations (the `inf` setting). */
int qnode_experiment_set_shots(qnode_experiment_t* exp, long shots);

/* Runs the training loop and writes the iteration CSV and a JSON summary.
 * Either path may be NULL to skip that output. */
int qnode_experiment_run(qnode_experiment_t* exp, const char* csv_path,
                         const char* summary_json_path);

/* Gradient self-check on random single-qubit instances. On success writes the
 * two max deviations (estimator vs oracle, estimator vs finite differences)
 * and sets *pass to 1/0. Any out pointer may be NULL. */
int qnode_grad_check(uint64_t seed, double* max_vs_oracle, double* max_vs_fd, int* pass);

/* sweep: "shots" or "grid". Writes the fitted log-log slope, the expected
 * slope, the tolerance, and pass (1/0). Any out pointer may be NULL. */
int qnode_scaling_study(const char* sweep, uint64_t seed, double* slope, double* expected,
                        double* tolerance, int* pass);

/* Deterministic child-seed derivation used for replicates. */
uint64_t qnode_derive_seed(uint64_t master, uint64_t stream);

/* Last error message on this thread; empty string when the previous call
 * succeeded. The pointer stays valid until the next API call. */
const char* qnode_last_error(void);

const char* qnode_version(void);

#ifdef __cplusplus
}
#endif

#endif /* QNODE_C_H */
