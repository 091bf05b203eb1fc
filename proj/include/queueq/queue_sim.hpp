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
#include <iosfwd>
#include <span>
#include <vector>

#include "queueq/rng.hpp"
#include "queueq/service_dist.hpp"
#include "queueq/workload.hpp"

namespace queueq {

struct Arrival {
  std::uint64_t id;
  std::size_t slot;
};

struct CustomerRecord {
  std::uint64_t id;
  std::size_t slot;
  std::size_t rank;        // same-slot customers served before this one
  std::uint64_t service;
  std::uint64_t wait;      // V_{slot-} plus services of earlier same-slot customers
};

struct DayOutcome {
  std::vector<CustomerRecord> customers;  // in service order
  std::vector<std::uint64_t> workload;    // V_{t-} for t = 0..T
  std::vector<std::uint32_t> arrivals;    // arrivals per slot
  std::uint64_t residual_workload = 0;    // V_{(T+1)-}
  std::uint64_t empty_at = 0;             // first instant after T with no work left

  std::uint64_t wait_of(std::uint64_t id) const;
};

// One day of the FCFS queue. Same-slot customers are put in uniformly random
// order (Fisher-Yates on `rng`), then service times are drawn in service order.
DayOutcome simulate_day(std::span<const Arrival> arrivals, std::size_t horizon, const ServiceDist& dist,
                        Stream& rng);

struct SlotEstimate {
  double mean_wait = 0.0;
  double std_error = 0.0;  // clustered by day
  std::uint64_t arrivals = 0;
  double idle_fraction = 0.0;  // fraction of days with V_{t-} == 0
  double idle_std_error = 0.0;
};

struct MonteCarloResult {
  std::vector<SlotEstimate> slots;
  std::uint64_t days = 0;
  std::uint64_t customers = 0;
};

// Simulates `days` independent days with Poisson(lambda) customers whose slots
// are drawn i.i.d. from p. Day d uses Stream(seed, {d}), so results do not
// depend on the number of worker threads.
MonteCarloResult monte_carlo_waits(const ArrivalDist& p, double lambda, const ServiceDist& dist,
                                   std::uint64_t days, std::uint64_t seed, std::size_t workers = 0);

// Debug trace: slot, V_{t-}, arrivals.
void write_day_trace_csv(std::ostream& os, const DayOutcome& day);

}  // namespace queueq
