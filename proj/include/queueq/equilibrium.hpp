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

#pragma once

#include <cstddef>
#include <functional>
#include <string_view>
#include <utility>
#include <vector>

#include "queueq/service_dist.hpp"
#include "queueq/workload.hpp"

namespace queueq {

enum class SolveMode { kGrid, kBisection };

std::string_view mode_name(SolveMode mode);
SolveMode parse_mode(std::string_view name);

struct SolverConfig {
  double epsilon = 1e-4;  // grid step for x0
  double delta = 1e-3;    // accepted |1 - G(x0)|
  double tol = 1e-10;     // bisection target for |G(x0) - 1|
  SolveMode mode = SolveMode::kBisection;
  double monotonicity_step = 0.01;  // coarse grid checked before bisecting
  bool report_all_roots = false;    // grid: keep scanning and list every delta-root

  void validate() const;
};

struct EquilibriumResult {
  ArrivalDist p_star;
  double w_star = 0.0;
  WaitProfile profile;
  double x0 = 0.0;        // accepted scan value, before renormalization
  double residual = 0.0;  // |1 - G(x0)|
  int iterations = 0;
  SolveMode mode = SolveMode::kBisection;
  bool fell_back = false;  // bisection requested but G failed the monotonicity check
  std::vector<std::pair<double, double>> root_intervals;
};

// x_t from x_0 through the self-consistent waiting-time recursion. x need not be
// a probability vector; x0 > 1 is accepted.
std::vector<double> forward_recursion(double x0, double lambda, const ServiceDist& dist, std::size_t horizon);

// G(x0): total mass of forward_recursion(x0).
double mass_G(double x0, double lambda, const ServiceDist& dist, std::size_t horizon);

// Root-search core, parameterized on the forward map so it can be driven by
// synthetic maps in tests.
using ForwardMap = std::function<std::vector<double>(double x0)>;

struct RootSearch {
  double x0 = 0.0;
  std::vector<double> x;
  double residual = 0.0;
  int iterations = 0;
  SolveMode mode = SolveMode::kGrid;
  bool fell_back = false;
  std::vector<std::pair<double, double>> root_intervals;
};

RootSearch grid_search(const ForwardMap& map, const SolverConfig& cfg);
RootSearch bisection_search(const ForwardMap& map, const SolverConfig& cfg);

// Scans x0 = k * epsilon for k = 1, 2, ... and stops at the first k with
// |1 - G| < delta.
EquilibriumResult solve_grid(const SolverConfig& cfg, double lambda, const ServiceDist& dist, std::size_t horizon);

// Checks G for monotonicity on a coarse grid, brackets the root and bisects
// to |G - 1| < tol. Falls back to the grid scan when G is not monotone.
EquilibriumResult solve_bisection(double tol, double lambda, const ServiceDist& dist, std::size_t horizon);
EquilibriumResult solve_bisection(const SolverConfig& cfg, double lambda, const ServiceDist& dist,
                                  std::size_t horizon);

EquilibriumResult solve(const SolverConfig& cfg, double lambda, const ServiceDist& dist, std::size_t horizon);

struct VerifyReport {
  bool is_equilibrium = false;
  double w_min = 0.0;            // min over all slots
  double w_min_supported = 0.0;  // min over slots with p_t > mass threshold
  double max_violation = 0.0;
  double tol = 0.0;
  std::vector<bool> supported;
  std::vector<bool> violating;
  WaitProfile profile;
};

// Every supported slot must sit within tol of the minimum wait, and no slot
// may undercut the supported minimum by more than tol.
VerifyReport verify_equilibrium(const ArrivalDist& p, double lambda, const ServiceDist& dist, double tol,
                                double mass_threshold = 1e-6);

// Tolerance used for solver output: 10 * delta * lambda * beta.
inline double equilibrium_tolerance(double delta, double lambda, const ServiceDist& dist) {
  return 10.0 * delta * lambda * dist.mean();
}

}  // namespace queueq
