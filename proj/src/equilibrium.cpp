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

#include "queueq/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numeric>

#include "queueq/error.hpp"

namespace queueq {
namespace {

double total(const std::vector<double>& x) { return std::accumulate(x.begin(), x.end(), 0.0); }

EquilibriumResult finish(RootSearch search, double lambda, const ServiceDist& dist) {
  ArrivalDist p = ArrivalDist::normalized(search.x);
  const double w_star = 0.5 * lambda * p[0] * dist.mean();
  WaitProfile profile = expected_waits(p, lambda, dist);
  profile.w_star = w_star;
  return EquilibriumResult{.p_star = std::move(p),
                           .w_star = w_star,
                           .profile = std::move(profile),
                           .x0 = search.x0,
                           .residual = search.residual,
                           .iterations = search.iterations,
                           .mode = search.mode,
                           .fell_back = search.fell_back,
                           .root_intervals = std::move(search.root_intervals)};
}

ForwardMap bind_map(double lambda, const ServiceDist& dist, std::size_t horizon) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    fail(ErrorCode::kInvalidParameter, fmt::format("arrival rate lambda must be > 0, got {}", lambda));
  }
  return [lambda, &dist, horizon](double x0) { return forward_recursion(x0, lambda, dist, horizon); };
}

}  // namespace

std::string_view mode_name(SolveMode mode) { return mode == SolveMode::kGrid ? "grid" : "bisection"; }

SolveMode parse_mode(std::string_view name) {
  if (name == "grid") return SolveMode::kGrid;
  if (name == "bisection") return SolveMode::kBisection;
  fail(ErrorCode::kInvalidParameter, fmt::format("unknown solver mode '{}' (expected grid|bisection)", name));
}

void SolverConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) fail(ErrorCode::kInvalidParameter, fmt::format("epsilon {} not in (0,1)", epsilon));
  if (!(delta > 0.0 && delta < 1.0)) fail(ErrorCode::kInvalidParameter, fmt::format("delta {} not in (0,1)", delta));
  if (!(tol > 0.0 && tol < 1.0)) fail(ErrorCode::kInvalidParameter, fmt::format("tol {} not in (0,1)", tol));
  if (!(monotonicity_step > 0.0 && monotonicity_step <= 0.5)) {
    fail(ErrorCode::kInvalidParameter, fmt::format("monotonicity_step {} not in (0,0.5]", monotonicity_step));
  }
}

std::vector<double> forward_recursion(double x0, double lambda, const ServiceDist& dist, std::size_t horizon) {
  if (!(x0 >= 0.0) || !std::isfinite(x0)) fail(ErrorCode::kInvalidParameter, fmt::format("x0 must be >= 0, got {}", x0));
  const double lb = lambda * dist.mean();
  std::vector<double> x(horizon + 1, 0.0);
  x[0] = x0;
  IdleTracker tracker(dist, horizon);
  double acc = 0.0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    const double xj = x[t - 1];
    const double rate = lambda * xj;
    acc += xj + (-1.0 + std::exp(-rate) * tracker.idle()) / lb;
    tracker.advance(rate);
    x[t] = std::max(0.0, x0 - 2.0 * acc);
  }
  return x;
}

double mass_G(double x0, double lambda, const ServiceDist& dist, std::size_t horizon) {
  return total(forward_recursion(x0, lambda, dist, horizon));
}

RootSearch grid_search(const ForwardMap& map, const SolverConfig& cfg) {
  cfg.validate();
  RootSearch best;
  best.mode = SolveMode::kGrid;
  bool found = false;
  double min_residual = std::numeric_limits<double>::infinity();
  double min_at = 0.0;
  const auto steps = static_cast<long>(std::floor(1.0 / cfg.epsilon + 1e-9));
  bool in_root = false;
  for (long k = 1; k <= steps; ++k) {
    const double x0 = static_cast<double>(k) * cfg.epsilon;
    auto x = map(x0);
    const double residual = std::fabs(1.0 - total(x));
    if (!found) ++best.iterations;
    if (residual < min_residual) {
      min_residual = residual;
      min_at = x0;
    }
    const bool hit = residual < cfg.delta;
    if (hit && !found) {
      found = true;
      best.x0 = x0;
      best.x = std::move(x);
      best.residual = residual;
      if (!cfg.report_all_roots) break;
    }
    if (cfg.report_all_roots) {
      if (hit && !in_root) best.root_intervals.emplace_back(x0, x0);
      if (hit) best.root_intervals.back().second = x0;
      in_root = hit;
    }
  }
  if (!found) {
    fail(ErrorCode::kNoRoot, fmt::format("grid scan over (0, 1] found no x0 with |1 - G| < {}; "
                                         "smallest residual {} at x0 = {}",
                                         cfg.delta, min_residual, min_at));
  }
  if (!cfg.report_all_roots) best.root_intervals.emplace_back(best.x0, best.x0);
  return best;
}

RootSearch bisection_search(const ForwardMap& map, const SolverConfig& cfg) {
  cfg.validate();
  // Coarse pass: G(0) = 0 anchors the grid.
  const auto steps = static_cast<long>(std::ceil(1.0 / cfg.monotonicity_step - 1e-9));
  std::vector<double> grid{0.0};
  std::vector<double> values{0.0};
  for (long k = 1; k <= steps; ++k) {
    const double x0 = std::min(1.0, static_cast<double>(k) * cfg.monotonicity_step);
    grid.push_back(x0);
    values.push_back(total(map(x0)));
  }
  int evaluations = static_cast<int>(steps);
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[i - 1] - 1e-10) {
      RootSearch r = grid_search(map, cfg);
      r.fell_back = true;
      r.iterations += evaluations;
      return r;
    }
  }
  std::size_t hi_index = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] >= 1.0) {
      hi_index = i;
      break;
    }
  }
  if (hi_index == 0) {
    fail(ErrorCode::kNoRoot, fmt::format("G(1) = {} < 1; no bracket for G(x0) = 1", values.back()));
  }
  double lo = grid[hi_index - 1];
  double hi = grid[hi_index];
  RootSearch r;
  r.mode = SolveMode::kBisection;
  if (std::fabs(values[hi_index] - 1.0) < cfg.tol) {
    r.x0 = hi;
    r.x = map(hi);
  }
  for (int it = 0; it < 200 && r.x.empty(); ++it) {
    const double mid = 0.5 * (lo + hi);
    auto x = map(mid);
    ++evaluations;
    const double g = total(x);
    if (std::fabs(g - 1.0) < cfg.tol || hi - lo < 4.0 * std::numeric_limits<double>::epsilon()) {
      r.x0 = mid;
      r.x = std::move(x);
      break;
    }
    (g < 1.0 ? lo : hi) = mid;
  }
  if (r.x.empty()) fail(ErrorCode::kNoRoot, "bisection did not converge");
  r.residual = std::fabs(1.0 - total(r.x));
  r.iterations = evaluations;
  r.root_intervals.emplace_back(r.x0, r.x0);
  return r;
}

EquilibriumResult solve_grid(const SolverConfig& cfg, double lambda, const ServiceDist& dist, std::size_t horizon) {
  return finish(grid_search(bind_map(lambda, dist, horizon), cfg), lambda, dist);
}

EquilibriumResult solve_bisection(const SolverConfig& cfg, double lambda, const ServiceDist& dist,
                                  std::size_t horizon) {
  return finish(bisection_search(bind_map(lambda, dist, horizon), cfg), lambda, dist);
}

EquilibriumResult solve_bisection(double tol, double lambda, const ServiceDist& dist, std::size_t horizon) {
  SolverConfig cfg;
  cfg.tol = tol;
  return solve_bisection(cfg, lambda, dist, horizon);
}

EquilibriumResult solve(const SolverConfig& cfg, double lambda, const ServiceDist& dist, std::size_t horizon) {
  return cfg.mode == SolveMode::kGrid ? solve_grid(cfg, lambda, dist, horizon)
                                      : solve_bisection(cfg, lambda, dist, horizon);
}

VerifyReport verify_equilibrium(const ArrivalDist& p, double lambda, const ServiceDist& dist, double tol,
                                double mass_threshold) {
  VerifyReport r;
  r.tol = tol;
  r.profile = expected_waits(p, lambda, dist);
  const auto& w = r.profile.w;
  const std::size_t n = w.size();
  r.supported.resize(n);
  r.violating.assign(n, false);
  r.w_min = *std::min_element(w.begin(), w.end());
  r.w_min_supported = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < n; ++t) {
    r.supported[t] = p[t] > mass_threshold;
    if (r.supported[t]) r.w_min_supported = std::min(r.w_min_supported, w[t]);
  }
  for (std::size_t t = 0; t < n; ++t) {
    double violation = 0.0;
    if (r.supported[t]) violation = std::fabs(w[t] - r.w_min);
    violation = std::max(violation, r.w_min_supported - w[t]);
    r.max_violation = std::max(r.max_violation, violation);
    r.violating[t] = violation > tol;
  }
  r.is_equilibrium = r.max_violation <= tol;
  r.profile.w_star = r.w_min_supported;
  return r;
}

}  // namespace queueq
