/*
 * Copyright 2026 The queueq Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef QUEUEQ_QUEUEQ_H
#define QUEUEQ_QUEUEQ_H

/*
 * C interface to the queueq library: equilibrium arrival-time distributions
 * for the discrete-time single-server Poisson queueing game, and the
 * agent-based learning model that approaches them.
 *
 * Objects are opaque handles released with the matching *_destroy call.
 * Every fallible function returns a qq_status; on failure a description of
 * the last error on the calling thread is available from qq_last_error().
 * Array outputs are written into caller buffers; functions taking a
 * capacity return the number of elements available.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(QUEUEQ_BUILDING_LIBRARY)
#define QQ_API __attribute__((visibility("default")))
#else
#define QQ_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qq_status {
  QQ_OK = 0,
  QQ_INVALID_ARGUMENT = 1,
  QQ_INVALID_CONFIG = 2,
  QQ_NO_ROOT = 3,
  QQ_VERIFICATION_FAILED = 4,
  QQ_INFEASIBLE_CV = 5,
  QQ_CAPACITY_EXCEEDED = 6,
  QQ_INVALID_INPUT = 7,
  QQ_IO_ERROR = 8,
  QQ_INTERNAL_ERROR = 9
} qq_status;

typedef enum qq_mode { QQ_MODE_GRID = 0, QQ_MODE_BISECTION = 1 } qq_mode;

typedef struct qq_service qq_service;
typedef struct qq_equilibrium qq_equilibrium;
typedef struct qq_abm_trace qq_abm_trace;

QQ_API const char* qq_version(void);
QQ_API const char* qq_last_error(void);
QQ_API const char* qq_status_name(qq_status status);

/* Service-time laws. family is "deterministic", "geometric" or
 * "geom_mixture"; cv is only read for geom_mixture. */
QQ_API qq_status qq_service_create(const char* family, double beta, double cv, qq_service** out);
QQ_API void qq_service_destroy(qq_service* service);
QQ_API double qq_service_mean(const qq_service* service);
QQ_API double qq_service_cv(const qq_service* service);
QQ_API double qq_service_tail_mass(const qq_service* service);
/* b(k) for k = 0..K; returns K + 1. */
QQ_API size_t qq_service_pmf(const qq_service* service, double* out, size_t capacity);
QQ_API qq_status qq_service_sample(const qq_service* service, uint64_t seed, size_t count, uint64_t* out);

/* Compound Poisson pmf on 0..kmax (mass_out holds kmax + 1 values). */
QQ_API qq_status qq_compound_poisson(const qq_service* service, double rate, size_t kmax, double* mass_out,
                                     double* tail_out);

/* Per-slot expected waits w_t(p) and E[V_{t-}]; ev_out may be NULL. */
QQ_API qq_status qq_expected_waits(const qq_service* service, double lambda, const double* p, size_t slots,
                                   double* w_out, double* ev_out);

/* Forward recursion from x0 (x_out holds horizon + 1 values) and its mass. */
QQ_API qq_status qq_forward_recursion(const qq_service* service, double lambda, size_t horizon, double x0,
                                      double* x_out);
QQ_API qq_status qq_mass_g(const qq_service* service, double lambda, size_t horizon, double x0, double* out);

typedef struct qq_solver_options {
  qq_mode mode;
  double epsilon;
  double delta;
  double tol;
} qq_solver_options;

QQ_API qq_solver_options qq_solver_options_default(void);

QQ_API qq_status qq_equilibrium_solve(const qq_service* service, double lambda, size_t horizon,
                                      const qq_solver_options* options, qq_equilibrium** out);
QQ_API void qq_equilibrium_destroy(qq_equilibrium* eq);
QQ_API size_t qq_equilibrium_p_star(const qq_equilibrium* eq, double* out, size_t capacity);
QQ_API size_t qq_equilibrium_waits(const qq_equilibrium* eq, double* out, size_t capacity);
QQ_API double qq_equilibrium_w_star(const qq_equilibrium* eq);
QQ_API double qq_equilibrium_x0(const qq_equilibrium* eq);
QQ_API double qq_equilibrium_residual(const qq_equilibrium* eq);
QQ_API int qq_equilibrium_iterations(const qq_equilibrium* eq);
QQ_API qq_mode qq_equilibrium_mode(const qq_equilibrium* eq);

typedef struct qq_verify_report {
  int is_equilibrium;
  double w_min;
  double max_violation;
  size_t violating_slots;
} qq_verify_report;

/* slot_flags (optional, `slots` entries) is set to 1 for violating slots. */
QQ_API qq_status qq_verify(const qq_service* service, double lambda, const double* p, size_t slots, double tol,
                           qq_verify_report* report, int* slot_flags);

/* Monte Carlo per-slot mean waits; any output pointer may be NULL. */
QQ_API qq_status qq_monte_carlo_waits(const qq_service* service, double lambda, const double* p, size_t slots,
                                      uint64_t days, uint64_t seed, double* mean_out, double* se_out,
                                      uint64_t* count_out);

/* Sigmoid-on-the-half-line exploitation probability with inflection at eta. */
QQ_API qq_status qq_sohl_theta(double eta, double x, double* out);

typedef struct qq_abm_options {
  size_t customers;
  double lambda;
  size_t horizon;
  double eta;
  uint64_t days;
  uint64_t seed;
  const uint64_t* checkpoints;
  size_t checkpoint_count;
  int argmin_visited_only;
} qq_abm_options;

QQ_API qq_abm_options qq_abm_options_default(void);
QQ_API qq_status qq_abm_run(const qq_service* service, const qq_abm_options* options, qq_abm_trace** out);
QQ_API void qq_abm_trace_destroy(qq_abm_trace* trace);
QQ_API size_t qq_abm_trace_checkpoints(const qq_abm_trace* trace);
QQ_API qq_status qq_abm_trace_checkpoint(const qq_abm_trace* trace, size_t index, uint64_t* day, double* p_bar,
                                         size_t capacity, double* w_bar);

/* Commands. config_json is the run configuration text (may be empty for
 * defaults); overrides fields left NULL / has_seed == 0 are ignored. On
 * return *report (if non-NULL) holds a human-readable summary to be freed
 * with qq_string_free, also when the status is an error. */
typedef struct qq_overrides {
  const char* out_dir;
  int has_seed;
  uint64_t seed;
  const char* mode;
  const char* format;
  const char* checkpoints;
} qq_overrides;

QQ_API qq_status qq_cmd_equilibrium(const char* config_json, const qq_overrides* overrides, char** report);
QQ_API qq_status qq_cmd_table1(const char* config_json, const qq_overrides* overrides, char** report);
QQ_API qq_status qq_cmd_abm(const char* config_json, const qq_overrides* overrides, char** report);
QQ_API qq_status qq_cmd_gscan(const char* config_json, const qq_overrides* overrides, char** report);
QQ_API qq_status qq_cmd_verify(const char* config_json, const qq_overrides* overrides, const char* p_file,
                               char** report);
QQ_API void qq_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* QUEUEQ_QUEUEQ_H */
