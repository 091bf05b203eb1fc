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

#include "queueq/queueq.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <string>

#include "queueq/abm.hpp"
#include "queueq/commands.hpp"
#include "queueq/config.hpp"
#include "queueq/equilibrium.hpp"
#include "queueq/error.hpp"
#include "queueq/queue_sim.hpp"
#include "queueq/service_dist.hpp"
#include "queueq/workload.hpp"

struct qq_service {
  queueq::ServiceDist dist;
};

struct qq_equilibrium {
  queueq::EquilibriumResult result;
};

struct qq_abm_trace {
  queueq::AbmTrace trace;
};

namespace {

thread_local std::string g_last_error;

qq_status to_status(queueq::ErrorCode code) {
  using queueq::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidParameter: return QQ_INVALID_ARGUMENT;
    case ErrorCode::kInfeasibleCv: return QQ_INFEASIBLE_CV;
    case ErrorCode::kNoRoot: return QQ_NO_ROOT;
    case ErrorCode::kCapacityExceeded: return QQ_CAPACITY_EXCEEDED;
    case ErrorCode::kInvalidConfig: return QQ_INVALID_CONFIG;
    case ErrorCode::kInvalidInput: return QQ_INVALID_INPUT;
    case ErrorCode::kIo: return QQ_IO_ERROR;
  }
  return QQ_INTERNAL_ERROR;
}

template <typename Fn>
qq_status guarded(Fn&& fn) noexcept {
  try {
    g_last_error.clear();
    return fn();
  } catch (const queueq::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return QQ_INTERNAL_ERROR;
}

void require(bool ok, const char* what) {
  if (!ok) queueq::fail(queueq::ErrorCode::kInvalidParameter, what);
}

size_t copy_out(const std::vector<double>& v, double* out, size_t capacity) {
  if (out) std::memcpy(out, v.data(), std::min(capacity, v.size()) * sizeof(double));
  return v.size();
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

queueq::Overrides to_overrides(const qq_overrides* o) {
  queueq::Overrides out;
  if (!o) return out;
  if (o->out_dir) out.out_dir = o->out_dir;
  if (o->has_seed) out.seed = o->seed;
  if (o->mode) out.mode = o->mode;
  if (o->format) out.format = o->format;
  if (o->checkpoints) out.checkpoints = o->checkpoints;
  return out;
}

template <typename Fn>
qq_status run_command(const char* config_json, const qq_overrides* overrides, char** report, Fn&& fn) noexcept {
  if (report) *report = nullptr;
  std::string text;
  const qq_status status = guarded([&] {
    const auto cfg = queueq::parse_config(config_json ? config_json : "", to_overrides(overrides));
    queueq::CommandReport r = fn(cfg);
    text = std::move(r.text);
    return r.status == 0 ? QQ_OK : QQ_VERIFICATION_FAILED;
  });
  if (report) *report = dup_string(status == QQ_OK || status == QQ_VERIFICATION_FAILED ? text : g_last_error);
  return status;
}

}  // namespace

extern "C" {

const char* qq_version(void) { return QUEUEQ_VERSION; }

const char* qq_last_error(void) { return g_last_error.c_str(); }

const char* qq_status_name(qq_status status) {
  switch (status) {
    case QQ_OK: return "ok";
    case QQ_INVALID_ARGUMENT: return "invalid-argument";
    case QQ_INVALID_CONFIG: return "invalid-config";
    case QQ_NO_ROOT: return "no-root";
    case QQ_VERIFICATION_FAILED: return "verification-failed";
    case QQ_INFEASIBLE_CV: return "infeasible-cv";
    case QQ_CAPACITY_EXCEEDED: return "capacity-exceeded";
    case QQ_INVALID_INPUT: return "invalid-input";
    case QQ_IO_ERROR: return "io-error";
    case QQ_INTERNAL_ERROR: return "internal-error";
  }
  return "unknown";
}

qq_status qq_service_create(const char* family, double beta, double cv, qq_service** out) {
  return guarded([&] {
    require(family && out, "family and out must be non-null");
    queueq::ServiceSpec spec{family, beta, cv};
    *out = new qq_service{spec.build()};
    return QQ_OK;
  });
}

void qq_service_destroy(qq_service* service) { delete service; }

double qq_service_mean(const qq_service* service) { return service ? service->dist.mean() : 0.0; }

double qq_service_cv(const qq_service* service) { return service ? service->dist.cv() : 0.0; }

double qq_service_tail_mass(const qq_service* service) { return service ? service->dist.tail_mass() : 0.0; }

size_t qq_service_pmf(const qq_service* service, double* out, size_t capacity) {
  return service ? copy_out(service->dist.pmf(), out, capacity) : 0;
}

qq_status qq_service_sample(const qq_service* service, uint64_t seed, size_t count, uint64_t* out) {
  return guarded([&] {
    require(service && (out || count == 0), "service and out must be non-null");
    queueq::Stream rng(seed);
    for (size_t i = 0; i < count; ++i) out[i] = service->dist.sample(rng);
    return QQ_OK;
  });
}

qq_status qq_compound_poisson(const qq_service* service, double rate, size_t kmax, double* mass_out,
                              double* tail_out) {
  return guarded([&] {
    require(service && mass_out, "service and mass_out must be non-null");
    const auto pmf = queueq::compound_poisson_pmf(rate, service->dist, kmax);
    copy_out(pmf.mass, mass_out, kmax + 1);
    if (tail_out) *tail_out = pmf.tail_mass;
    return QQ_OK;
  });
}

qq_status qq_expected_waits(const qq_service* service, double lambda, const double* p, size_t slots,
                            double* w_out, double* ev_out) {
  return guarded([&] {
    require(service && p && w_out && slots > 0, "service, p and w_out must be non-null");
    const queueq::ArrivalDist dist(std::vector<double>(p, p + slots));
    const auto prof = queueq::expected_waits(dist, lambda, service->dist);
    copy_out(prof.w, w_out, slots);
    if (ev_out) copy_out(prof.ev, ev_out, slots);
    return QQ_OK;
  });
}

qq_status qq_forward_recursion(const qq_service* service, double lambda, size_t horizon, double x0,
                               double* x_out) {
  return guarded([&] {
    require(service && x_out, "service and x_out must be non-null");
    require(lambda > 0.0, "lambda must be > 0");
    copy_out(queueq::forward_recursion(x0, lambda, service->dist, horizon), x_out, horizon + 1);
    return QQ_OK;
  });
}

qq_status qq_mass_g(const qq_service* service, double lambda, size_t horizon, double x0, double* out) {
  return guarded([&] {
    require(service && out, "service and out must be non-null");
    require(lambda > 0.0, "lambda must be > 0");
    *out = queueq::mass_G(x0, lambda, service->dist, horizon);
    return QQ_OK;
  });
}

qq_solver_options qq_solver_options_default(void) {
  const queueq::SolverConfig d;
  return qq_solver_options{QQ_MODE_BISECTION, d.epsilon, d.delta, d.tol};
}

qq_status qq_equilibrium_solve(const qq_service* service, double lambda, size_t horizon,
                               const qq_solver_options* options, qq_equilibrium** out) {
  return guarded([&] {
    require(service && out, "service and out must be non-null");
    queueq::SolverConfig cfg;
    if (options) {
      cfg.mode = options->mode == QQ_MODE_GRID ? queueq::SolveMode::kGrid : queueq::SolveMode::kBisection;
      cfg.epsilon = options->epsilon;
      cfg.delta = options->delta;
      cfg.tol = options->tol;
    }
    *out = new qq_equilibrium{queueq::solve(cfg, lambda, service->dist, horizon)};
    return QQ_OK;
  });
}

void qq_equilibrium_destroy(qq_equilibrium* eq) { delete eq; }

size_t qq_equilibrium_p_star(const qq_equilibrium* eq, double* out, size_t capacity) {
  return eq ? copy_out(eq->result.p_star.probs(), out, capacity) : 0;
}

size_t qq_equilibrium_waits(const qq_equilibrium* eq, double* out, size_t capacity) {
  return eq ? copy_out(eq->result.profile.w, out, capacity) : 0;
}

double qq_equilibrium_w_star(const qq_equilibrium* eq) { return eq ? eq->result.w_star : 0.0; }
double qq_equilibrium_x0(const qq_equilibrium* eq) { return eq ? eq->result.x0 : 0.0; }
double qq_equilibrium_residual(const qq_equilibrium* eq) { return eq ? eq->result.residual : 0.0; }
int qq_equilibrium_iterations(const qq_equilibrium* eq) { return eq ? eq->result.iterations : 0; }

qq_mode qq_equilibrium_mode(const qq_equilibrium* eq) {
  return eq && eq->result.mode == queueq::SolveMode::kGrid ? QQ_MODE_GRID : QQ_MODE_BISECTION;
}

qq_status qq_verify(const qq_service* service, double lambda, const double* p, size_t slots, double tol,
                    qq_verify_report* report, int* slot_flags) {
  return guarded([&] {
    require(service && p && report && slots > 0, "service, p and report must be non-null");
    const queueq::ArrivalDist dist(std::vector<double>(p, p + slots));
    const auto v = queueq::verify_equilibrium(dist, lambda, service->dist, tol);
    report->is_equilibrium = v.is_equilibrium ? 1 : 0;
    report->w_min = v.w_min;
    report->max_violation = v.max_violation;
    report->violating_slots = 0;
    for (size_t t = 0; t < slots; ++t) {
      report->violating_slots += v.violating[t];
      if (slot_flags) slot_flags[t] = v.violating[t] ? 1 : 0;
    }
    return QQ_OK;
  });
}

qq_status qq_monte_carlo_waits(const qq_service* service, double lambda, const double* p, size_t slots,
                               uint64_t days, uint64_t seed, double* mean_out, double* se_out,
                               uint64_t* count_out) {
  return guarded([&] {
    require(service && p && slots > 0, "service and p must be non-null");
    const queueq::ArrivalDist dist(std::vector<double>(p, p + slots));
    const auto mc = queueq::monte_carlo_waits(dist, lambda, service->dist, days, seed);
    for (size_t t = 0; t < slots; ++t) {
      if (mean_out) mean_out[t] = mc.slots[t].mean_wait;
      if (se_out) se_out[t] = mc.slots[t].std_error;
      if (count_out) count_out[t] = mc.slots[t].arrivals;
    }
    return QQ_OK;
  });
}

qq_status qq_sohl_theta(double eta, double x, double* out) {
  return guarded([&] {
    require(out != nullptr, "out must be non-null");
    require(x >= 0.0, "x must be >= 0");
    *out = queueq::sohl_params(eta)(x);
    return QQ_OK;
  });
}

qq_abm_options qq_abm_options_default(void) {
  static const uint64_t kCheckpoints[] = {200, 2000, 20000};
  const queueq::AbmConfig d;
  return qq_abm_options{d.customers, d.lambda, d.horizon, d.eta, d.days, d.seed, kCheckpoints, 3, 0};
}

qq_status qq_abm_run(const qq_service* service, const qq_abm_options* options, qq_abm_trace** out) {
  return guarded([&] {
    require(service && options && out, "service, options and out must be non-null");
    require(options->checkpoints || options->checkpoint_count == 0, "checkpoints must be non-null");
    queueq::AbmConfig cfg;
    cfg.customers = options->customers;
    cfg.lambda = options->lambda;
    cfg.horizon = options->horizon;
    cfg.eta = options->eta;
    cfg.days = options->days;
    cfg.seed = options->seed;
    cfg.checkpoints.assign(options->checkpoints, options->checkpoints + options->checkpoint_count);
    cfg.options.argmin_visited_only = options->argmin_visited_only != 0;
    *out = new qq_abm_trace{queueq::run_abm(cfg, service->dist)};
    return QQ_OK;
  });
}

void qq_abm_trace_destroy(qq_abm_trace* trace) { delete trace; }

size_t qq_abm_trace_checkpoints(const qq_abm_trace* trace) { return trace ? trace->trace.checkpoints.size() : 0; }

qq_status qq_abm_trace_checkpoint(const qq_abm_trace* trace, size_t index, uint64_t* day, double* p_bar,
                                  size_t capacity, double* w_bar) {
  return guarded([&] {
    require(trace && index < trace->trace.checkpoints.size(), "checkpoint index out of range");
    const auto& cp = trace->trace.checkpoints[index];
    if (day) *day = cp.day;
    if (p_bar) copy_out(cp.p_bar.probs(), p_bar, capacity);
    if (w_bar) *w_bar = cp.w_bar;
    return QQ_OK;
  });
}

qq_status qq_cmd_equilibrium(const char* config_json, const qq_overrides* overrides, char** report) {
  return run_command(config_json, overrides, report, [](const auto& cfg) { return queueq::cmd_equilibrium(cfg); });
}

qq_status qq_cmd_table1(const char* config_json, const qq_overrides* overrides, char** report) {
  return run_command(config_json, overrides, report, [](const auto& cfg) { return queueq::cmd_table1(cfg); });
}

qq_status qq_cmd_abm(const char* config_json, const qq_overrides* overrides, char** report) {
  return run_command(config_json, overrides, report, [](const auto& cfg) { return queueq::cmd_abm(cfg); });
}

qq_status qq_cmd_gscan(const char* config_json, const qq_overrides* overrides, char** report) {
  return run_command(config_json, overrides, report, [](const auto& cfg) { return queueq::cmd_gscan(cfg); });
}

qq_status qq_cmd_verify(const char* config_json, const qq_overrides* overrides, const char* p_file,
                        char** report) {
  return run_command(config_json, overrides, report, [p_file](const auto& cfg) {
    if (!p_file) queueq::fail(queueq::ErrorCode::kInvalidInput, "verify needs an arrival distribution file");
    return queueq::cmd_verify(cfg, p_file);
  });
}

void qq_string_free(char* s) { std::free(s); }

}  // extern "C"
