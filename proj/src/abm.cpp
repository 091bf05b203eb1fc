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

#include "queueq/abm.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <optional>

#include "queueq/error.hpp"

namespace queueq {

double SohlTheta::operator()(double x) const noexcept {
  if (!(x > 0.0)) return 0.0;
  // 1 - e^{c2 x} == -expm1(c2 x); overflow gives exp(-0) == 1.
  return std::exp(-c1 / std::expm1(c2 * x));
}

double theta(const SohlTheta& s, double x) noexcept { return s(x); }

SohlTheta sohl_params(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    fail(ErrorCode::kInvalidParameter, fmt::format("SOHL inflection point must be > 0, got {}", eta));
  }
  const double l3 = std::log(3.0);
  SohlTheta s;
  s.c1 = (2.0 - l3) * l3 / (l3 - 1.0);
  s.c2 = std::log(0.5 * (s.c1 + std::sqrt(s.c1 * s.c1 + 4.0))) / eta;
  s.eta = eta;
  return s;
}

AbmPopulation::AbmPopulation(std::size_t customers, double lambda, std::size_t horizon, SohlTheta theta,
                             AbmOptions options)
    : customers_(customers),
      horizon_(horizon),
      join_probability_(customers > 0 ? lambda / static_cast<double>(customers) : 0.0),
      theta_(theta),
      options_(options),
      visits_(customers * (horizon + 1), 0),
      waits_(customers * (horizon + 1), 0),
      visits_total_(customers, 0),
      lifetime_wait_(customers, 0) {
  if (customers == 0) fail(ErrorCode::kInvalidParameter, "population needs at least one customer");
  if (!(join_probability_ > 0.0 && join_probability_ <= 1.0)) {
    fail(ErrorCode::kInvalidParameter,
         fmt::format("join probability lambda/N = {} must lie in (0, 1]", join_probability_));
  }
}

double AbmPopulation::mean_wait(std::size_t i, std::size_t t) const noexcept {
  const auto a = visits(i, t);
  return static_cast<double>(wait_sum(i, t)) / static_cast<double>(std::max<std::uint64_t>(1, a));
}

double AbmPopulation::exploit_probability(std::size_t i) const noexcept {
  if (options_.pure_exploration) return 0.0;
  return theta_(static_cast<double>(visits_total_[i]));
}

std::vector<std::size_t> AbmPopulation::preferred_slots(std::size_t i) const {
  const bool visited_only = options_.argmin_visited_only && visits_total_[i] > 0;
  // Compare exact rationals wait_sum / max(1, visits) by cross-multiplying.
  std::vector<std::size_t> best;
  std::uint64_t best_num = 0, best_den = 1;
  for (std::size_t t = 0; t < slots(); ++t) {
    if (visited_only && visits(i, t) == 0) continue;
    const std::uint64_t num = wait_sum(i, t);
    const std::uint64_t den = std::max<std::uint64_t>(1, visits(i, t));
    if (best.empty()) {
      best.push_back(t);
      best_num = num;
      best_den = den;
      continue;
    }
    const unsigned __int128 lhs = static_cast<unsigned __int128>(num) * best_den;
    const unsigned __int128 rhs = static_cast<unsigned __int128>(best_num) * den;
    if (lhs < rhs) {
      best.assign(1, t);
      best_num = num;
      best_den = den;
    } else if (lhs == rhs) {
      best.push_back(t);
    }
  }
  return best;
}

std::vector<double> AbmPopulation::strategy(std::size_t i) const {
  const double th = exploit_probability(i);
  std::vector<double> p(slots(), (1.0 - th) / static_cast<double>(slots()));
  if (th > 0.0) {
    const auto best = preferred_slots(i);
    const double share = th / static_cast<double>(best.size());
    for (auto t : best) p[t] += share;
  }
  return p;
}

void AbmPopulation::record(std::size_t i, std::size_t slot, std::uint64_t wait) {
  visits_[i * slots() + slot] += 1;
  waits_[i * slots() + slot] += wait;
  visits_total_[i] += 1;
  lifetime_wait_[i] += wait;
}

DayOutcome step_day(AbmPopulation& pop, const ServiceDist& dist, const Stream& day_rng) {
  std::vector<Arrival> arrivals;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    Stream rng = day_rng.derive(i + 1);
    if (!rng.bernoulli(pop.join_probability())) continue;
    std::size_t slot;
    if (rng.uniform() < pop.exploit_probability(i)) {
      const auto best = pop.preferred_slots(i);
      slot = best[rng.below(best.size())];
    } else {
      slot = rng.below(pop.slots());
    }
    arrivals.push_back(Arrival{i, slot});
  }
  Stream queue_rng = day_rng.derive(0);
  DayOutcome day = simulate_day(arrivals, pop.horizon(), dist, queue_rng);
  for (const auto& c : day.customers) pop.record(c.id, c.slot, c.wait);
  pop.finish_day();
  return day;
}

AveragedState averaged_state(const AbmPopulation& pop) {
  std::vector<double> p_bar(pop.slots(), 0.0);
  double w_acc = 0.0;
  std::size_t contributors = 0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const auto s = pop.strategy(i);
    for (std::size_t t = 0; t < s.size(); ++t) p_bar[t] += s[t];
    if (pop.visits(i) > 0) {
      w_acc += static_cast<double>(pop.lifetime_wait(i)) / static_cast<double>(pop.visits(i));
      ++contributors;
    }
  }
  for (double& x : p_bar) x /= static_cast<double>(pop.size());
  return AveragedState{ArrivalDist(std::move(p_bar)),
                       contributors > 0 ? w_acc / static_cast<double>(contributors) : 0.0};
}

void AbmConfig::validate() const {
  if (customers == 0) fail(ErrorCode::kInvalidParameter, "abm needs N >= 1");
  if (!(lambda > 0.0)) fail(ErrorCode::kInvalidParameter, fmt::format("lambda must be > 0, got {}", lambda));
  if (!(lambda <= static_cast<double>(customers))) {
    fail(ErrorCode::kInvalidParameter, fmt::format("lambda {} exceeds N = {}", lambda, customers));
  }
  if (horizon == 0) fail(ErrorCode::kInvalidParameter, "horizon T must be >= 1");
  if (!(eta > 0.0)) fail(ErrorCode::kInvalidParameter, fmt::format("eta must be > 0, got {}", eta));
  if (days == 0) fail(ErrorCode::kInvalidParameter, "abm needs days >= 1");
  for (auto c : checkpoints) {
    if (c < 1 || c > days) fail(ErrorCode::kInvalidParameter, fmt::format("checkpoint {} outside 1..{}", c, days));
  }
}

AbmTrace run_abm(const AbmConfig& cfg, const ServiceDist& dist) {
  cfg.validate();
  AbmPopulation pop(cfg.customers, cfg.lambda, cfg.horizon, sohl_params(cfg.eta), cfg.options);
  std::vector<std::uint64_t> checkpoints = cfg.checkpoints;
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());

  AbmTrace trace;
  trace.seed = cfg.seed;
  trace.daily_arrivals.reserve(cfg.days);
  auto next = checkpoints.begin();
  for (std::uint64_t day = 1; day <= cfg.days; ++day) {
    const bool checkpoint = next != checkpoints.end() && *next == day;
    std::optional<ArrivalDist> p_bar;
    if (checkpoint) p_bar = averaged_state(pop).p_bar;
    const DayOutcome outcome = step_day(pop, dist, Stream(cfg.seed, {day}));
    trace.daily_arrivals.push_back(static_cast<std::uint32_t>(outcome.customers.size()));
    if (checkpoint) {
      trace.checkpoints.push_back(AbmCheckpoint{day, std::move(*p_bar), averaged_state(pop).w_bar});
      ++next;
    }
  }
  return trace;
}

}  // namespace queueq
