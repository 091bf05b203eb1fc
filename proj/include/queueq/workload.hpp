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
#include <optional>
#include <span>
#include <vector>

#include "queueq/service_dist.hpp"

namespace queueq {

// Probability vector over the acceptance slots 0..T.
class ArrivalDist {
 public:
  // Validates nonnegativity and unit mass within `tol`.
  explicit ArrivalDist(std::vector<double> probs, double tol = 1e-9);

  static ArrivalDist uniform(std::size_t horizon);
  static ArrivalDist point_mass(std::size_t horizon, std::size_t slot);
  // Divides by the total; throws if the total is not positive.
  static ArrivalDist normalized(std::span<const double> weights);

  std::size_t horizon() const noexcept { return probs_.size() - 1; }
  std::size_t slots() const noexcept { return probs_.size(); }
  double operator[](std::size_t t) const noexcept { return probs_[t]; }
  const std::vector<double>& probs() const noexcept { return probs_; }

 private:
  std::vector<double> probs_;
};

double total_variation(std::span<const double> a, std::span<const double> b);

// Finitely supported nonnegative vector; tail_mass is the probability beyond
// mass.size() - 1.
struct TruncatedPmf {
  std::vector<double> mass;
  double tail_mass = 0.0;

  double total() const;
  double mean() const;  // sum k * mass[k], truncation-sensitive
};

struct WaitProfile {
  std::vector<double> w;   // expected wait of an arrival in slot t
  std::vector<double> ev;  // E[V_{t-}], workload just before slot t
  std::optional<double> w_star;
};

// Panjer recursion for the compound Poisson law of the work brought in one
// slot: Poisson(rate) arrivals, each with a service time drawn from `dist`.
TruncatedPmf compound_poisson_pmf(double rate, const ServiceDist& dist, std::size_t kmax);

inline constexpr double kWorkloadTailTolerance = 1e-9;
inline constexpr std::size_t kWorkloadMaxLevels = std::size_t{1} << 16;

std::size_t initial_kmax(double lambda, const ServiceDist& dist);

// Laws of V_{t-} for t = 0..T. With kmax == 0 the truncation starts at
// initial_kmax() and doubles until every tail is <= kWorkloadTailTolerance.
std::vector<TruncatedPmf> workload_evolution(const ArrivalDist& p, double lambda,
                                             const ServiceDist& dist, std::size_t kmax = 0);

// Tracks P(V_{t-} = 0) slot by slot for arbitrary nonnegative per-slot
// arrival rates. The workload drops by at most one per slot, so levels above
// the remaining horizon can never drain to zero in time; keeping levels
// 0..horizon+1 therefore makes every idle probability up to the horizon exact.
class IdleTracker {
 public:
  IdleTracker(const ServiceDist& dist, std::size_t horizon);

  // P(V_{t-} = 0) for the current slot t.
  double idle() const noexcept { return v_[0]; }
  std::size_t slot() const noexcept { return slot_; }

  // Adds Poisson(rate) arrivals in the current slot and moves to the next.
  void advance(double rate);

 private:
  const ServiceDist* dist_;
  std::size_t levels_;
  std::size_t slot_ = 0;
  std::vector<double> v_;
  std::vector<double> s_;
  std::vector<double> next_;
};

// w_t(p) per slot via the running-sum form of E[V_{t-}].
WaitProfile expected_waits(const ArrivalDist& p, double lambda, const ServiceDist& dist);

// C(q, p) = sum_t q_t w_t(p).
double cost(const ArrivalDist& q, const ArrivalDist& p, double lambda, const ServiceDist& dist);

}  // namespace queueq
