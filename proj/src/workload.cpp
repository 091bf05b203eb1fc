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

#include "queueq/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

#include "queueq/error.hpp"

namespace queueq {
namespace {

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    fail(ErrorCode::kInvalidParameter, fmt::format("arrival rate lambda must be > 0, got {}", lambda));
  }
}

// Panjer into a caller-provided buffer of size kmax + 1.
void panjer_into(double rate, const ServiceDist& dist, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  out[0] = std::exp(-rate);
  if (rate == 0.0) return;
  const auto& b = dist.pmf();
  const std::size_t bmax = b.size() - 1;
  for (std::size_t k = 1; k < out.size(); ++k) {
    double acc = 0.0;
    const std::size_t top = std::min(k, bmax);
    for (std::size_t m = 1; m <= top; ++m) {
      if (b[m] != 0.0) acc += static_cast<double>(m) * b[m] * out[k - m];
    }
    out[k] = rate / static_cast<double>(k) * acc;
  }
}

// v_next(0) = v(0)(s(0) + s(1)) + v(1)s(0); v_next(k) = sum_l v(l) s(k+1-l).
void workload_step(std::span<const double> v, std::span<const double> s, std::span<double> next) {
  const std::size_t n = next.size();
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    const std::size_t top = std::min(k + 1, v.size() - 1);
    for (std::size_t l = 0; l <= top; ++l) {
      const std::size_t j = k + 1 - l;
      if (j < s.size()) acc += v[l] * s[j];
    }
    next[k] = acc;
  }
  // Level 0 also collects V + S == 1, which drains within the slot.
  if (n > 0) next[0] += v[0] * s[0];
}

std::vector<TruncatedPmf> evolve_fixed(const ArrivalDist& p, double lambda, const ServiceDist& dist,
                                       std::size_t kmax) {
  const std::size_t horizon = p.horizon();
  std::vector<TruncatedPmf> out;
  out.reserve(horizon + 1);
  TruncatedPmf v0;
  v0.mass.assign(kmax + 1, 0.0);
  v0.mass[0] = 1.0;
  out.push_back(std::move(v0));
  std::vector<double> s(kmax + 2);
  for (std::size_t t = 1; t <= horizon; ++t) {
    panjer_into(lambda * p[t - 1], dist, s);
    TruncatedPmf next;
    next.mass.assign(kmax + 1, 0.0);
    workload_step(out.back().mass, s, next.mass);
    next.tail_mass = std::max(0.0, 1.0 - std::accumulate(next.mass.begin(), next.mass.end(), 0.0));
    out.push_back(std::move(next));
  }
  return out;
}

}  // namespace

ArrivalDist::ArrivalDist(std::vector<double> probs, double tol) : probs_(std::move(probs)) {
  if (probs_.empty()) fail(ErrorCode::kInvalidParameter, "arrival distribution has no slots");
  double total = 0.0;
  for (std::size_t t = 0; t < probs_.size(); ++t) {
    if (!(probs_[t] >= 0.0) || !std::isfinite(probs_[t])) {
      fail(ErrorCode::kInvalidParameter, fmt::format("arrival probability p[{}] = {} is invalid", t, probs_[t]));
    }
    total += probs_[t];
  }
  if (std::fabs(total - 1.0) > tol) {
    fail(ErrorCode::kInvalidParameter, fmt::format("arrival probabilities sum to {}, not 1", total));
  }
}

ArrivalDist ArrivalDist::uniform(std::size_t horizon) {
  return ArrivalDist(std::vector<double>(horizon + 1, 1.0 / static_cast<double>(horizon + 1)));
}

ArrivalDist ArrivalDist::point_mass(std::size_t horizon, std::size_t slot) {
  if (slot > horizon) fail(ErrorCode::kInvalidParameter, fmt::format("slot {} beyond horizon {}", slot, horizon));
  std::vector<double> probs(horizon + 1, 0.0);
  probs[slot] = 1.0;
  return ArrivalDist(std::move(probs));
}

ArrivalDist ArrivalDist::normalized(std::span<const double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) fail(ErrorCode::kInvalidParameter, "cannot normalize a vector with no positive mass");
  std::vector<double> probs(weights.begin(), weights.end());
  for (double& x : probs) x /= total;
  return ArrivalDist(std::move(probs));
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorCode::kInvalidParameter, "total variation of vectors of different length");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::fabs(a[i] - b[i]);
  return 0.5 * acc;
}

double TruncatedPmf::total() const { return std::accumulate(mass.begin(), mass.end(), 0.0); }

double TruncatedPmf::mean() const {
  double acc = 0.0;
  for (std::size_t k = 0; k < mass.size(); ++k) acc += static_cast<double>(k) * mass[k];
  return acc;
}

TruncatedPmf compound_poisson_pmf(double rate, const ServiceDist& dist, std::size_t kmax) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    fail(ErrorCode::kInvalidParameter, fmt::format("compound Poisson rate must be >= 0, got {}", rate));
  }
  TruncatedPmf out;
  out.mass.resize(kmax + 1);
  panjer_into(rate, dist, out.mass);
  out.tail_mass = std::max(0.0, 1.0 - out.total());
  return out;
}

std::size_t initial_kmax(double lambda, const ServiceDist& dist) {
  const double beta = dist.mean();
  return static_cast<std::size_t>(std::ceil(20.0 + 4.0 * lambda * beta + 10.0 * std::sqrt(lambda) * beta));
}

std::vector<TruncatedPmf> workload_evolution(const ArrivalDist& p, double lambda, const ServiceDist& dist,
                                             std::size_t kmax) {
  check_lambda(lambda);
  if (kmax != 0) return evolve_fixed(p, lambda, dist, kmax);
  for (std::size_t k = initial_kmax(lambda, dist);; k *= 2) {
    k = std::min(k, kWorkloadMaxLevels);
    auto out = evolve_fixed(p, lambda, dist, k);
    const bool ok = std::all_of(out.begin(), out.end(),
                                [](const TruncatedPmf& v) { return v.tail_mass <= kWorkloadTailTolerance; });
    if (ok) return out;
    if (k == kWorkloadMaxLevels) {
      double worst = 0.0;
      for (const auto& v : out) worst = std::max(worst, v.tail_mass);
      fail(ErrorCode::kCapacityExceeded,
           fmt::format("workload tail {} still above {} at {} levels", worst, kWorkloadTailTolerance, k));
    }
  }
}

IdleTracker::IdleTracker(const ServiceDist& dist, std::size_t horizon)
    : dist_(&dist), levels_(horizon + 2), v_(levels_, 0.0), s_(levels_ + 1, 0.0), next_(levels_, 0.0) {
  v_[0] = 1.0;
}

void IdleTracker::advance(double rate) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    fail(ErrorCode::kInvalidParameter, fmt::format("slot arrival rate must be >= 0, got {}", rate));
  }
  panjer_into(rate, *dist_, s_);
  workload_step(v_, s_, next_);
  v_.swap(next_);
  ++slot_;
}

WaitProfile expected_waits(const ArrivalDist& p, double lambda, const ServiceDist& dist) {
  check_lambda(lambda);
  const double beta = dist.mean();
  const std::size_t n = p.slots();
  WaitProfile out;
  out.w.resize(n);
  out.ev.resize(n);
  IdleTracker tracker(dist, p.horizon());
  double ev = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) {
      const double rate = lambda * p[t - 1];
      ev += rate * beta - 1.0 + std::exp(-rate) * tracker.idle();
      tracker.advance(rate);
    }
    out.ev[t] = ev;
    out.w[t] = ev + 0.5 * lambda * p[t] * beta;
  }
  return out;
}

double cost(const ArrivalDist& q, const ArrivalDist& p, double lambda, const ServiceDist& dist) {
  if (q.slots() != p.slots()) {
    fail(ErrorCode::kInvalidParameter,
         fmt::format("cost needs equal horizons, got {} and {}", q.horizon(), p.horizon()));
  }
  const WaitProfile prof = expected_waits(p, lambda, dist);
  double acc = 0.0;
  for (std::size_t t = 0; t < q.slots(); ++t) acc += q[t] * prof.w[t];
  return acc;
}

}  // namespace queueq
