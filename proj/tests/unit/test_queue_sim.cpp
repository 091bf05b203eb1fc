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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "queueq/queue_sim.hpp"
#include "queueq/rng.hpp"
#include "queueq/service_dist.hpp"
#include "queueq/workload.hpp"

using namespace queueq;

namespace {

std::vector<Arrival> random_arrivals(Stream& rng, std::size_t horizon, std::size_t n) {
  std::vector<Arrival> a;
  for (std::size_t i = 0; i < n; ++i) a.push_back(Arrival{i, static_cast<std::size_t>(rng.below(horizon + 1))});
  return a;
}

}  // namespace

TEST_CASE("a lone customer at slot 0 does not wait") {
  Stream rng(1);
  const std::vector<Arrival> a{{7, 0}};
  const auto day = simulate_day(a, 5, ServiceDist::deterministic(3), rng);
  REQUIRE(day.customers.size() == 1);
  CHECK(day.customers[0].wait == 0);
  CHECK(day.workload[0] == 0);
  CHECK(day.wait_of(7) == 0);
}

TEST_CASE("two customers in slot 0 wait 0 and 3 in random order") {
  const std::vector<Arrival> a{{0, 0}, {1, 0}};
  int first_served_zero = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    Stream rng(seed);
    const auto day = simulate_day(a, 3, ServiceDist::deterministic(3), rng);
    std::vector<std::uint64_t> w{day.customers[0].wait, day.customers[1].wait};
    CHECK(w == std::vector<std::uint64_t>{0, 3});
    CHECK(day.customers[0].rank == 0);
    CHECK(day.customers[1].rank == 1);
    if (day.customers[0].id == 0) ++first_served_zero;
  }
  CHECK(std::abs(first_served_zero - 1000) <= 3 * std::sqrt(500.0));
}

TEST_CASE("a later arrival sees the drained workload") {
  Stream rng(3);
  const std::vector<Arrival> a{{0, 0}, {1, 1}};
  const auto day = simulate_day(a, 3, ServiceDist::deterministic(3), rng);
  CHECK(day.wait_of(1) == 2);
  CHECK(day.workload[1] == 2);
  CHECK(day.workload[2] == 4);
  CHECK(day.workload[3] == 3);
}

TEST_CASE("day invariants on random inputs") {
  Stream gen(17);
  const auto dist = ServiceDist::geometric_mixture(4, 1.7);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t horizon = 1 + gen.below(20);
    const auto arrivals = random_arrivals(gen, horizon, gen.below(12));
    Stream rng = gen.derive(rep);
    const auto day = simulate_day(arrivals, horizon, dist, rng);
    REQUIRE(day.workload.size() == horizon + 1);
    CHECK(day.workload[0] == 0);
    std::vector<std::uint64_t> added(horizon + 1, 0);
    std::vector<std::uint64_t> served_before(horizon + 1, 0);
    std::vector<std::size_t> rank(horizon + 1, 0);
    for (const auto& c : day.customers) {
      CHECK(c.service >= 1);
      CHECK(c.rank == rank[c.slot]++);
      CHECK(c.wait == day.workload[c.slot] + served_before[c.slot]);
      served_before[c.slot] += c.service;
      added[c.slot] += c.service;
    }
    for (std::size_t t = 0; t <= horizon; ++t) CHECK(day.arrivals[t] == rank[t]);
    for (std::size_t t = 1; t <= horizon; ++t) {
      const std::uint64_t total = day.workload[t - 1] + added[t - 1];
      CHECK(day.workload[t] == (total > 0 ? total - 1 : 0));
    }
    const std::uint64_t last = day.workload[horizon] + added[horizon];
    CHECK(day.residual_workload == (last > 0 ? last - 1 : 0));
    CHECK(day.empty_at == horizon + std::max<std::uint64_t>(last, 1));
  }
}

TEST_CASE("simulate_day is deterministic in the stream") {
  Stream gen(4);
  const auto arrivals = random_arrivals(gen, 10, 15);
  Stream a(99), b(99);
  const auto d = ServiceDist::geometric(3);
  const auto x = simulate_day(arrivals, 10, d, a);
  const auto y = simulate_day(arrivals, 10, d, b);
  REQUIRE(x.customers.size() == y.customers.size());
  for (std::size_t i = 0; i < x.customers.size(); ++i) {
    CHECK(x.customers[i].id == y.customers[i].id);
    CHECK(x.customers[i].service == y.customers[i].service);
    CHECK(x.customers[i].wait == y.customers[i].wait);
  }
  CHECK(x.workload == y.workload);
  std::ostringstream sa, sb;
  write_day_trace_csv(sa, x);
  write_day_trace_csv(sb, y);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().rfind("slot,", 0) == 0);
}

TEST_CASE("slot-0 mass: mean wait is lambda beta / 2") {
  const auto mc = monte_carlo_waits(ArrivalDist::point_mass(0, 0), 5.0, ServiceDist::deterministic(3), 100000, 8);
  const auto& e = mc.slots[0];
  CHECK(std::abs(e.mean_wait - 7.5) <= 3.0 * e.std_error);
  CHECK(e.std_error > 0.0);
}

TEST_CASE("vanishing load gives no waiting") {
  const auto mc = monte_carlo_waits(ArrivalDist::uniform(5), 1e-6, ServiceDist::geometric(3), 10000, 8);
  for (const auto& s : mc.slots) CHECK(s.mean_wait == 0.0);
}

TEST_CASE("simulated waits agree with the analytic profile") {
  std::vector<double> raw{3, 1, 0, 2, 2, 1, 4};
  const auto p = ArrivalDist::normalized(raw);
  for (const auto& d : {ServiceDist::deterministic(2), ServiceDist::geometric(2),
                        ServiceDist::geometric_mixture(2, 1.5)}) {
    const auto prof = expected_waits(p, 4.0, d);
    const auto mc = monte_carlo_waits(p, 4.0, d, 200000, 31);
    for (std::size_t t = 0; t < raw.size(); ++t) {
      CAPTURE(t);
      const auto& e = mc.slots[t];
      if (e.arrivals < 100) continue;
      CHECK(std::abs(e.mean_wait - prof.w[t]) <= 3.0 * e.std_error);
    }
  }
}

TEST_CASE("monte carlo results do not depend on the worker count") {
  const auto p = ArrivalDist::uniform(8);
  const auto d = ServiceDist::geometric(3);
  const auto one = monte_carlo_waits(p, 5.0, d, 9000, 12, 1);
  const auto many = monte_carlo_waits(p, 5.0, d, 9000, 12, 3);
  CHECK(one.customers == many.customers);
  for (std::size_t t = 0; t < one.slots.size(); ++t) {
    CHECK(one.slots[t].arrivals == many.slots[t].arrivals);
    CHECK(one.slots[t].mean_wait == many.slots[t].mean_wait);
    CHECK(one.slots[t].std_error == many.slots[t].std_error);
  }
}

TEST_CASE("Poisson sampler moments") {
  for (double mean : {0.3, 5.0, 29.0, 31.0, 80.0}) {
    Stream rng(static_cast<std::uint64_t>(mean * 100));
    const int n = 400000;
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double k = static_cast<double>(sample_poisson(mean, rng));
      s1 += k;
      s2 += k * k;
    }
    const double m = s1 / n;
    const double v = s2 / n - m * m;
    CAPTURE(mean);
    CHECK(std::abs(m - mean) <= 4.0 * std::sqrt(mean / n));
    CHECK(std::abs(v - mean) <= 4.0 * mean * std::sqrt(2.0 / n) + 4.0 * std::sqrt(mean / n));
  }
  Stream rng(1);
  CHECK(sample_poisson(0.0, rng) == 0);
}

TEST_CASE("Poisson sampler pmf above the inversion range") {
  const double mean = 50.0;
  Stream rng(77);
  const int n = 500000;
  std::vector<double> counts(101, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto k = sample_poisson(mean, rng);
    counts[std::min<std::uint64_t>(k, 100)] += 1.0;
  }
  double stat = 0.0;
  int dof = -1;
  double e_acc = 0.0, o_acc = 0.0, cum = 0.0;
  for (int k = 0; k <= 100; ++k) {
    double pk = std::exp(-mean + k * std::log(mean) - std::lgamma(k + 1.0));
    if (k == 100) pk = 1.0 - cum;
    cum += pk;
    e_acc += pk * n;
    o_acc += counts[k];
    if (e_acc >= 5.0 || k == 100) {
      stat += (o_acc - e_acc) * (o_acc - e_acc) / e_acc;
      ++dof;
      e_acc = o_acc = 0.0;
    }
  }
  const double a = 2.0 / (9.0 * dof);
  const double crit = dof * std::pow(1.0 - a + 3.090232 * std::sqrt(a), 3.0);
  CAPTURE(stat);
  CHECK(stat < crit);
}

TEST_CASE("stream derivation is stable and independent of draw order") {
  Stream a(5, {3, 4});
  Stream b(5, {3, 4});
  CHECK(a() == b());
  Stream root(5);
  Stream c = root.derive(1);
  root();
  Stream d = Stream(5).derive(1);
  CHECK(c() == d());
  Stream u(9);
  for (int i = 0; i < 10000; ++i) {
    const double x = u.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    CHECK(u.below(7) < 7);
  }
}
