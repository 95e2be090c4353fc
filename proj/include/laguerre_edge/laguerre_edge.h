/*
 * laguerre_edge — C API for sampling Laguerre beta-ensembles in bidiagonal
 * form and evaluating the log determinant of the shifted matrix near the
 * upper spectral edge.
 *
 * All functions return le_status; LE_OK is zero. On failure,
 * le_last_error() returns a thread-local message with detail. Objects are
 * opaque handles created by the create/build functions and released with the
 * matching destroy; strings returned through char** are owned by the caller
 * and released with le_string_free.
 */
#ifndef LAGUERRE_EDGE_H
#define LAGUERRE_EDGE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum le_status {
    LE_OK = 0,
    LE_ERR_INVALID_ARGUMENT = 1,
    LE_ERR_NUMERICAL = 2, /* guard trips, shift inside support, solver failure */
    LE_ERR_IO = 3,
    LE_ERR_VERIFY_FAILED = 4,
    LE_ERR_INTERNAL = 5
} le_status;

typedef struct le_params le_params;
typedef struct le_geometry le_geometry;
typedef struct le_sample le_sample;
typedef struct le_trace le_trace;

/* Thread-local message for the most recent failure in this thread. */
const char* le_last_error(void);

void le_string_free(char* s);

/* ------------------------------------------------------------------ params */

/* Builds ensemble parameters with m = round(n/lambda) >= n and
 * gamma = d_plus + sigma_n n^(-2/3). Pass sigma_override = NULL for the
 * default sigma_n = (log n)^(3/2). Requires n >= 5, lambda in (0,1],
 * alpha > 0. */
le_status le_params_create(int64_t n, double lambda, double alpha,
                           const double* sigma_override, le_params** out);
void le_params_destroy(le_params* p);

int64_t le_params_n(const le_params* p);
int64_t le_params_m(const le_params* p);
double le_params_alpha(const le_params* p);
double le_params_lambda(const le_params* p);
double le_params_sigma(const le_params* p);
double le_params_gamma(const le_params* p);
double le_params_d_plus(const le_params* p);
double le_params_d_minus(const le_params* p);

/* CltConstants plus the standardization inputs, as a JSON object. */
le_status le_constants_json(const le_params* p, char** out_json);

/* --------------------------------------------------------------- geometry */

le_status le_geometry_build(const le_params* p, le_geometry** out);
void le_geometry_destroy(le_geometry* g);

typedef enum le_geom_col {
    LE_GEOM_RHO_PLUS = 0,
    LE_GEOM_RHO_MINUS = 1,
    LE_GEOM_TAU = 2,
    LE_GEOM_DELTA = 3,
    LE_GEOM_OMEGA = 4,
    LE_GEOM_GAMMA_RATIO = 5,
    LE_GEOM_GAMMA_MINUS_OMEGA = 6,
    LE_GEOM_G = 7
} le_geom_col;

/* Zero-copy view of one geometry column. The pointer addresses logical index
 * 0 (unused) through n+1; entries outside a column's defined range are NaN.
 * Valid until the geometry handle is destroyed. *count receives n+2. */
const double* le_geometry_view(const le_geometry* g, le_geom_col col, int64_t* count);

/* CSV dump (columns i,rho_plus,rho_minus,omega,gamma_ratio,tau,delta,g).
 * path NULL or "-" writes to stdout. */
le_status le_geometry_dump_csv(const le_geometry* g, const char* path);

/* ----------------------------------------------------------------- sample */

le_status le_sample_draw(const le_params* p, uint64_t master_seed, uint64_t replica_index,
                         le_sample** out);
void le_sample_destroy(le_sample* s);

uint64_t le_sample_seed(const le_sample* s);
/* Arrays of length n (a_sq, d) and n-1 (b_sq, c). */
const double* le_sample_a_sq(const le_sample* s, int64_t* count);
const double* le_sample_b_sq(const le_sample* s, int64_t* count);
const double* le_sample_d(const le_sample* s, int64_t* count);
const double* le_sample_c(const le_sample* s, int64_t* count);

/* CSV dump (columns i,a_sq,b_sq,d,c). path NULL or "-" writes to stdout. */
le_status le_sample_dump_csv(const le_sample* s, const char* path);

/* ----------------------------------------------------------------- logdet */

le_status le_logdet_run(const le_sample* s, const le_geometry* g, le_trace** out);
void le_trace_destroy(le_trace* t);

double le_trace_log_abs_e(const le_trace* t);
double le_trace_log_abs_d(const le_trace* t);
double le_trace_log_abs_cal_d(const le_trace* t);
int le_trace_sign(const le_trace* t);
double le_trace_max_abs_r(const le_trace* t);
int64_t le_trace_guard_events(const le_trace* t);
/* R_i for 2 <= i <= n. */
double le_trace_r(const le_trace* t, int64_t i);

/* Independent eigenvalue-based evaluation of log|det(T - gamma m)|
 * (n <= 5000). */
le_status le_eigen_oracle(const le_sample* s, const le_params* p, double* out_log_abs);

/* Standardized CLT statistic for a given log|det(T/m - gamma)|. */
le_status le_standardize(const le_params* p, double log_abs_cal_d, double* out_z);

/* Single-replica convenience: draw, run, and report as JSON
 * {log_abs_calD, sign, max_abs_r[, oracle_value]}. */
le_status le_logdet_json(const le_params* p, uint64_t seed, int with_oracle, char** out_json);

/* --------------------------------------------------------------- simulate */

/* Runs `replicas` independent replicas and writes one JSONL record per
 * replica ({replica, seed, z, log_abs_calD, max_abs_r}) to jsonl_path, plus
 * an optional summary JSON and CSV export. Any path may be NULL (skip) or
 * "-" (stdout). workers = 0 means the LAGUERRE_EDGE_WORKERS environment
 * variable, else the hardware thread count. Progress goes to stderr when
 * progress != 0. Output is bit-identical for fixed inputs regardless of
 * worker count. */
le_status le_simulate(const le_params* p, int64_t replicas, uint64_t master_seed, int workers,
                      int run_oracle, const char* jsonl_path, const char* summary_path,
                      const char* csv_path, int progress);

/* --------------------------------------------------------------- diagnose */

/* Lemma-conclusion report as a JSON array of
 * {lemma_id, predicted, observed, ratio, tolerance, pass}. */
le_status le_diagnose_json(const le_params* p, int64_t replicas, uint64_t master_seed,
                           const char* tolerance_manifest_path, char** out_json);

/* ----------------------------------------------------------------- verify */

/* Runs the acceptance suite, printing one pass/fail line per criterion to
 * stdout and progress to stderr. *out_failures receives the number of failed
 * criteria; the return status is LE_OK when the suite executed (regardless
 * of criterion outcomes). tolerance_manifest_path may be NULL for the
 * embedded defaults. */
le_status le_verify(const char* tolerance_manifest_path, int* out_failures);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LAGUERRE_EDGE_H */
