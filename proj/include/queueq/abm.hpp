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
#include <cstdint>
#include <vector>

#include "queueq/queue_sim.hpp"
#include "queueq/rng.hpp"
#include "queueq/service_dist.hpp"
#include "queueq/workload.hpp"

namespace queueq {

// Sigmoid on the half line: theta(0) = 0, theta(x) = exp(c1 / (1 - e^{c2 x}))
// for x > 0. Increasing, with limit 1.
struct SohlTheta {
  double c1 = 0.0;
  double c2 = 0.0;
  double eta = 0.0;  // inflection point

  double operator()(double x) const noexcept;
};

// c1 is fixed so that theta equals 1/3 at its inflection point; c2 places the
// inflection point at eta.
SohlTheta sohl_params(double eta);
double theta(const SohlTheta& s, double x) noexcept;

struct AbmOptions {
  // Restrict the exploit branch to slots the customer has actually visited.
  // Off by default: unvisited slots have mean wait 0 and tie for the minimum.
  bool argmin_visited_only = false;
  // theta == 0 for everyone, i.e. always pick a uniform slot.
  bool pure_exploration = false;
};

// N potential customers with their arrival and waiting-time histories.
class AbmPopulation {
 public:
  AbmPopulation(std::size_t customers, double lambda, std::size_t horizon, SohlTheta theta,
                AbmOptions options = {});

  std::size_t size() const noexcept { return customers_; }
  std::size_t horizon() const noexcept { return horizon_; }
  std::size_t slots() const noexcept { return horizon_ + 1; }
  double join_probability() const noexcept { return join_probability_; }
  const SohlTheta& sohl() const noexcept { return theta_; }
  const AbmOptions& options() const noexcept { return options_; }
  std::uint64_t day() const noexcept { return day_; }  // completed days

  std::uint64_t visits(std::size_t i) const noexcept { return visits_total_[i]; }
  std::uint64_t visits(std::size_t i, std::size_t t) const noexcept { return visits_[i * slots() + t]; }
  std::uint64_t wait_sum(std::size_t i, std::size_t t) const noexcept { return waits_[i * slots() + t]; }
  std::uint64_t lifetime_wait(std::size_t i) const noexcept { return lifetime_wait_[i]; }
  double mean_wait(std::size_t i, std::size_t t) const noexcept;

  // Probability of following experience on the next day.
  double exploit_probability(std::size_t i) const noexcept;
  // Slots minimizing the customer's mean experienced wait.
  std::vector<std::size_t> preferred_slots(std::size_t i) const;
  // Mixed strategy for the next day.
  std::vector<double> strategy(std::size_t i) const;

  void record(std::size_t i, std::size_t slot, std::uint64_t wait);
  void finish_day() noexcept { ++day_; }

 private:
  std::size_t customers_;
  std::size_t horizon_;
  double join_probability_;
  SohlTheta theta_;
  AbmOptions options_;
  std::uint64_t day_ = 0;
  std::vector<std::uint64_t> visits_;
  std::vector<std::uint64_t> waits_;
  std::vector<std::uint64_t> visits_total_;
  std::vector<std::uint64_t> lifetime_wait_;
};

// Plays one day: every customer joins with probability lambda / N and picks a
// slot from its mixed strategy; the queue is then simulated and histories are
// updated. Customer i draws from day_rng.derive(i + 1), the queue from
// day_rng.derive(0).
DayOutcome step_day(AbmPopulation& pop, const ServiceDist& dist, const Stream& day_rng);

struct AveragedState {
  ArrivalDist p_bar;  // population mean of the strategies for the next day
  double w_bar;       // mean over customers with >= 1 visit of their lifetime mean wait
};

AveragedState averaged_state(const AbmPopulation& pop);

struct AbmConfig {
  std::size_t customers = 100;
  double lambda = 5.0;
  std::size_t horizon = 20;
  double eta = 30.0;
  std::uint64_t days = 20000;
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> checkpoints{200, 2000, 20000};
  AbmOptions options;

  void validate() const;
};

struct AbmCheckpoint {
  std::uint64_t day;
  ArrivalDist p_bar;  // strategies played on `day`
  double w_bar;       // after `day` has been played
};

struct AbmTrace {
  std::uint64_t seed = 0;
  std::vector<AbmCheckpoint> checkpoints;
  std::vector<std::uint32_t> daily_arrivals;
};

// Day d uses Stream(seed, {d}).
AbmTrace run_abm(const AbmConfig& cfg, const ServiceDist& dist);

}  // namespace queueq
