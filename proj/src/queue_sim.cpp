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

#include "queueq/queue_sim.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <mutex>
#include <ostream>

#include "queueq/error.hpp"
#include "queueq/parallel.hpp"

namespace queueq {

std::uint64_t DayOutcome::wait_of(std::uint64_t id) const {
  for (const auto& c : customers) {
    if (c.id == id) return c.wait;
  }
  fail(ErrorCode::kInvalidParameter, fmt::format("customer {} did not arrive", id));
}

DayOutcome simulate_day(std::span<const Arrival> arrivals, std::size_t horizon, const ServiceDist& dist,
                        Stream& rng) {
  DayOutcome day;
  day.arrivals.assign(horizon + 1, 0);
  for (const auto& a : arrivals) {
    if (a.slot > horizon) fail(ErrorCode::kInvalidParameter, fmt::format("arrival slot {} beyond horizon {}", a.slot, horizon));
    ++day.arrivals[a.slot];
  }
  // Bucket by slot, keeping input order inside a bucket before shuffling.
  std::vector<std::vector<std::uint64_t>> by_slot(horizon + 1);
  for (std::size_t s = 0; s <= horizon; ++s) by_slot[s].reserve(day.arrivals[s]);
  for (const auto& a : arrivals) by_slot[a.slot].push_back(a.id);

  day.workload.resize(horizon + 1);
  day.customers.reserve(arrivals.size());
  std::uint64_t v = 0;
  for (std::size_t t = 0; t <= horizon; ++t) {
    day.workload[t] = v;
    auto& group = by_slot[t];
    for (std::size_t i = group.size(); i > 1; --i) {
      std::swap(group[i - 1], group[rng.below(i)]);
    }
    std::uint64_t w = v;
    for (std::size_t rank = 0; rank < group.size(); ++rank) {
      const std::uint64_t b = dist.sample(rng);
      day.customers.push_back(CustomerRecord{group[rank], t, rank, b, w});
      w += b;
    }
    v = w > 0 ? w - 1 : 0;
  }
  day.residual_workload = v;
  day.empty_at = horizon + 1 + v;
  return day;
}

namespace {

struct SlotSums {
  std::uint64_t n = 0;        // arrivals
  std::uint64_t wsum = 0;     // total wait
  double w2 = 0.0;            // sum over days of (day wait total)^2
  double wn = 0.0;            // sum over days of day wait total * day count
  double n2 = 0.0;            // sum over days of day count^2
  std::uint64_t idle = 0;     // days with V_{t-} == 0
};

std::size_t draw_slot(std::span<const double> cdf, Stream& rng) {
  const double u = rng.uniform() * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

}  // namespace

MonteCarloResult monte_carlo_waits(const ArrivalDist& p, double lambda, const ServiceDist& dist,
                                   std::uint64_t days, std::uint64_t seed, std::size_t workers) {
  if (days < 1) fail(ErrorCode::kInvalidParameter, "monte carlo needs at least one day");
  if (!(lambda > 0.0)) fail(ErrorCode::kInvalidParameter, fmt::format("lambda must be > 0, got {}", lambda));
  const std::size_t slots = p.slots();
  std::vector<double> cdf(slots);
  double acc = 0.0;
  for (std::size_t t = 0; t < slots; ++t) cdf[t] = (acc += p[t]);

  // Fixed-size blocks of days; per-block sums are merged in block order so the
  // floating-point totals are independent of scheduling.
  constexpr std::uint64_t kBlock = 4096;
  const std::uint64_t blocks = (days + kBlock - 1) / kBlock;
  std::vector<std::vector<SlotSums>> partial(blocks, std::vector<SlotSums>(slots));
  parallel_for(
      blocks,
      [&](std::size_t b) {
        auto& sums = partial[b];
        std::vector<Arrival> arrivals;
        std::vector<std::uint64_t> day_w(slots);
        std::vector<std::uint64_t> day_n(slots);
        const std::uint64_t first = b * kBlock;
        const std::uint64_t last = std::min(days, first + kBlock);
        for (std::uint64_t d = first; d < last; ++d) {
          Stream rng(seed, {d});
          const std::uint64_t n = sample_poisson(lambda, rng);
          arrivals.clear();
          for (std::uint64_t i = 0; i < n; ++i) arrivals.push_back(Arrival{i, draw_slot(cdf, rng)});
          const DayOutcome day = simulate_day(arrivals, slots - 1, dist, rng);
          std::fill(day_w.begin(), day_w.end(), 0);
          std::fill(day_n.begin(), day_n.end(), 0);
          for (const auto& c : day.customers) {
            day_w[c.slot] += c.wait;
            ++day_n[c.slot];
          }
          for (std::size_t t = 0; t < slots; ++t) {
            auto& s = sums[t];
            s.n += day_n[t];
            s.wsum += day_w[t];
            const auto dw = static_cast<double>(day_w[t]);
            const auto dn = static_cast<double>(day_n[t]);
            s.w2 += dw * dw;
            s.wn += dw * dn;
            s.n2 += dn * dn;
            if (day.workload[t] == 0) ++s.idle;
          }
        }
      },
      workers);

  MonteCarloResult out;
  out.days = days;
  out.slots.resize(slots);
  const auto dd = static_cast<double>(days);
  for (std::size_t t = 0; t < slots; ++t) {
    SlotSums total;
    for (const auto& part : partial) {
      total.n += part[t].n;
      total.wsum += part[t].wsum;
      total.w2 += part[t].w2;
      total.wn += part[t].wn;
      total.n2 += part[t].n2;
      total.idle += part[t].idle;
    }
    auto& e = out.slots[t];
    e.arrivals = total.n;
    out.customers += total.n;
    if (total.n > 0) {
      const auto n = static_cast<double>(total.n);
      const double r = static_cast<double>(total.wsum) / n;
      e.mean_wait = r;
      // Ratio estimator variance with days as clusters.
      const double ss = std::max(0.0, total.w2 - 2.0 * r * total.wn + r * r * total.n2);
      e.std_error = days > 1 ? std::sqrt(ss * dd / (dd - 1.0)) / n : 0.0;
    }
    e.idle_fraction = static_cast<double>(total.idle) / dd;
    e.idle_std_error = std::sqrt(e.idle_fraction * (1.0 - e.idle_fraction) / dd);
  }
  return out;
}

void write_day_trace_csv(std::ostream& os, const DayOutcome& day) {
  os << "slot,workload,arrivals\n";
  for (std::size_t t = 0; t < day.workload.size(); ++t) {
    os << t << ',' << day.workload[t] << ',' << day.arrivals[t] << '\n';
  }
}

}  // namespace queueq
