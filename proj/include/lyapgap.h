/* lyapgap: noise-forced singular-value gap experiments for bounded matrix
 * cocycles. C interface over the C++ core: opaque handles, status codes,
 * JSON/CSV results. All functions are thread-compatible; handles are not
 * shared between threads without external synchronization. */

#ifndef LYAPGAP_H
#define LYAPGAP_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lg_status {
  LG_OK = 0,
  LG_ERR_INVALID_ARGUMENT = 1,
  LG_ERR_PRECONDITION = 2,
  LG_ERR_DOMAIN = 3,
  LG_ERR_SINGULAR = 4,
  LG_ERR_DEGENERATE_SUM = 5,
  LG_ERR_ACCUMULATION = 6,
  LG_ERR_IO = 7,
  LG_ERR_PARSE = 8,
  LG_ERR_INTERNAL = 9
} lg_status;

/* Opaque experiment configuration. */
typedef struct lg_experiment lg_experiment;
/* Opaque result: a canonical JSON document plus named output files. */
typedef struct lg_report lg_report;

const char* lg_version(void);
const char* lg_status_name(lg_status status);
/* Message of the most recent failure on this thread; empty when none. */
const char* lg_last_error(void);

/* --- configuration ----------------------------------------------------- */

lg_status lg_experiment_create(lg_experiment** out);
lg_status lg_experiment_from_json(const char* json_text, lg_experiment** out);
lg_status lg_experiment_to_json(const lg_experiment* e, lg_report** out);
void lg_experiment_free(lg_experiment* e);

/* Keys: dim, threads, gap_index, pair_j, pair_k. */
lg_status lg_experiment_set_int(lg_experiment* e, const char* key, int value);
/* Keys: seed, n_max, trials, block_len, traces, glue_trials, sequence_seed,
 * horizon, schedule_stride. */
lg_status lg_experiment_set_u64(lg_experiment* e, const char* key,
                                uint64_t value);
/* Keys: epsilon, gamma, zeta, schedule_ratio, or param.<name> for sequence
 * generator knobs (param.L, param.sigma, param.angle). */
lg_status lg_experiment_set_real(lg_experiment* e, const char* key,
                                 double value);
/* Keys: sequence (generator kind), sequence_file, mode, schedule. */
lg_status lg_experiment_set_string(lg_experiment* e, const char* key,
                                   const char* value);

/* --- runs ---------------------------------------------------------------
 * Each produces a report owning its JSON summary and output files. */

lg_status lg_run_gap(const lg_experiment* e, lg_report** out);
lg_status lg_run_bookkeeping(const lg_experiment* e, lg_report** out);
lg_status lg_run_glue_tail(const lg_experiment* e, lg_report** out);
lg_status lg_run_constants(const lg_experiment* e, lg_report** out);
lg_status lg_run_verify(const lg_experiment* e, lg_report** out);

/* --- reports ------------------------------------------------------------ */

const char* lg_report_json(const lg_report* r);
int lg_report_file_count(const lg_report* r);
const char* lg_report_file_name(const lg_report* r, int index);
const char* lg_report_file_content(const lg_report* r, int index);
/* Writes every file into out_dir (created if missing). */
lg_status lg_report_write(const lg_report* r, const char* out_dir);
/* 1 when the run's internal pass flag is set (verify: all checks green;
 * other runs: completed), else 0. */
int lg_report_ok(const lg_report* r);
void lg_report_free(lg_report* r);

/* --- direct numeric entry points ---------------------------------------- */

/* Deterministic SVD of a row-major dim x dim matrix, 2 <= dim <= 8:
 * a = u * diag(s) * v^T with s descending. Buffers: u, v dim*dim; s dim. */
lg_status lg_svd(int dim, const double* a, double* u, double* s, double* v);

/* A' with ||A' - A|| <= eps/2, ||A'|| <= max(1/2, 1 - eps/2) and smallest
 * singular value at least eps/2. */
lg_status lg_nonsingular_init(int dim, const double* a, double eps,
                              double* out);

/* Gluing statistic F(L, A, R) for the (j, k) singular value pair. */
lg_status lg_glue_statistic(int dim, const double* l, const double* a,
                            const double* r, int j, int k, double* out);

#ifdef __cplusplus
}
#endif

#endif /* LYAPGAP_H */
