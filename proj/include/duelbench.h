/*
 * duelbench -- dueling-bandit simulation laboratory.
 *
 * C interface to the experiment harness: configure a contextual dueling
 * bandit experiment, run one algorithm over repeated instances, aggregate
 * regret traces, write CSV/manifest outputs, sweep the exploration weight,
 * and run the built-in self checks.
 *
 * All objects are opaque; every fallible call returns a db_status and leaves
 * a human-readable message in db_last_error() (thread-local, valid until the
 * next failing call on the same thread).
 */

#ifndef DUELBENCH_H
#define DUELBENCH_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum db_status {
  DB_OK = 0,
  DB_ERR_INVALID_ARGUMENT = 1, /* null pointer, unknown key, bad buffer */
  DB_ERR_INVALID_CONFIG = 2,   /* rejected configuration value */
  DB_ERR_SEQUENCING = 3,       /* select/update protocol violation */
  DB_ERR_SAMPLER_DIVERGED = 4, /* Langevin iterate became non-finite */
  DB_ERR_ESTIMATION_FAILED = 5,/* logistic MLE did not converge */
  DB_ERR_AGGREGATION = 6,      /* no successful runs / length mismatch */
  DB_ERR_IO = 7,               /* file could not be written */
  DB_ERR_INTERNAL = 8
} db_status;

const char* db_version(void);
const char* db_status_name(db_status status);
const char* db_last_error(void);

typedef struct db_config db_config;
typedef struct db_result db_result;
typedef struct db_sweep db_sweep;

/*
 * Configuration.  Keys for db_config_set_int:
 *   rounds (or T), dim (or d), arms (or K), runs, seed, threads,
 *   sgld_steps, warm_start (0/1), resample_arms (0/1), vacdb_layers
 * Keys for db_config_set_real:
 *   alpha, mu (overrides alpha/sqrt(T)), eta, beta, lambda, perturbation,
 *   bound, sgld_step0, sgld_decay, prior_scale
 * Keys for db_config_set_string:
 *   algo   = fgts | maxinp | maxpairucb | colstim | vacdb
 *   convention = raw | unit
 *   prior  = gaussian | ball
 *   preset = experiment | theory
 *   out    = output CSV path (used by sweeps; bench callers usually write
 *            explicitly via db_result_write_csv)
 * Unknown keys fail with DB_ERR_INVALID_ARGUMENT; out-of-range values fail
 * with DB_ERR_INVALID_CONFIG.
 */
db_config* db_config_new(void);
void db_config_free(db_config* cfg);
db_status db_config_set_int(db_config* cfg, const char* key, long long value);
db_status db_config_set_real(db_config* cfg, const char* key, double value);
db_status db_config_set_string(db_config* cfg, const char* key,
                               const char* value);

/*
 * Runs the configured experiment: `runs` independent instances, each played
 * for `rounds` rounds.  Succeeds when at least one run finishes; individual
 * run failures are recorded on the result.  The caller owns *out_result.
 */
db_status db_run(const db_config* cfg, db_result** out_result);

long long db_result_rounds(const db_result* result);
int db_result_runs(const db_result* result);      /* configured runs */
int db_result_runs_used(const db_result* result); /* successful runs */
int db_result_run_failed(const db_result* result, int run_index);
const char* db_result_run_error(const db_result* result, int run_index);

/* copies exactly db_result_rounds() values; len must be at least that */
db_status db_result_mean_cumulative(const db_result* result, double* out,
                                    size_t len);
db_status db_result_std_cumulative(const db_result* result, double* out,
                                   size_t len);
db_status db_result_run_cumulative(const db_result* result, int run_index,
                                   double* out, size_t len);
double db_result_final_mean(const db_result* result);
double db_result_final_std(const db_result* result);

/* CSV: header round,mean_cum_regret,std_cum_regret, 17 significant digits */
db_status db_result_write_csv(const db_result* result, const char* path);
/* key = value description of the resolved config and per-run outcomes */
db_status db_result_write_manifest(const db_result* result, const char* path);
void db_result_free(db_result* result);

/*
 * Exploration-weight sweep: re-runs the config at each alpha with identical
 * seeds (paired instances).  If the config's `out` is set, one CSV per alpha
 * plus a summary CSV and a manifest are written as a side effect.
 */
db_status db_run_sweep(const db_config* cfg, const double* alphas,
                       size_t count, db_sweep** out_sweep);
size_t db_sweep_count(const db_sweep* sweep);
double db_sweep_alpha(const db_sweep* sweep, size_t index);
/* borrowed reference, valid while the sweep lives */
const db_result* db_sweep_result(const db_sweep* sweep, size_t index);
db_status db_sweep_write_summary(const db_sweep* sweep, const char* path);
void db_sweep_free(db_sweep* sweep);

/*
 * Built-in self checks (link identities, duel sampling, regret rewrite,
 * gradients, selection-rule oracles, posterior agreement).  Returns the
 * number of failed checks, or -1 on internal error.  *out_report receives a
 * malloc'd PASS/FAIL report; release it with db_string_free.
 */
int db_validate(int quick, char** out_report);
void db_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* DUELBENCH_H */
