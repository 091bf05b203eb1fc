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

#include "queueq/service_dist.hpp"

#include <cmath>
#include <fmt/format.h>

#include "queueq/error.hpp"

namespace queueq {
namespace {

double geometric_cv(double beta) { return std::sqrt(1.0 - 1.0 / beta); }

// 1 + floor(log U / log(1 - 1/beta)), U uniform on (0, 1].
std::uint64_t sample_geometric(double beta, Stream& rng) {
  if (beta == 1.0) return 1;
  const double u = rng.uniform_open0();
  const double k = std::floor(std::log(u) / std::log1p(-1.0 / beta));
  return 1 + static_cast<std::uint64_t>(k);
}

}  // namespace

std::string_view family_name(ServiceFamily family) {
  switch (family) {
    case ServiceFamily::kDeterministic: return "deterministic";
    case ServiceFamily::kGeometric: return "geometric";
    case ServiceFamily::kGeomMixture: return "geom_mixture";
  }
  return "unknown";
}

ServiceFamily parse_family(std::string_view name) {
  if (name == "deterministic") return ServiceFamily::kDeterministic;
  if (name == "geometric") return ServiceFamily::kGeometric;
  if (name == "geom_mixture") return ServiceFamily::kGeomMixture;
  fail(ErrorCode::kInvalidParameter,
       fmt::format("unknown service family '{}' (expected deterministic|geometric|geom_mixture)", name));
}

ServiceDist ServiceDist::deterministic(double beta) {
  if (!(beta >= 1.0) || beta != std::floor(beta) || beta > 1e6) {
    fail(ErrorCode::kInvalidParameter,
         fmt::format("deterministic service time must be an integer >= 1, got {}", beta));
  }
  ServiceDist d;
  d.family_ = ServiceFamily::kDeterministic;
  d.mean_ = beta;
  d.cv_ = 0.0;
  d.pmf_.assign(static_cast<std::size_t>(beta) + 1, 0.0);
  d.pmf_.back() = 1.0;
  return d;
}

ServiceDist ServiceDist::geometric(double beta) {
  if (!(beta >= 1.0) || !std::isfinite(beta)) {
    fail(ErrorCode::kInvalidParameter, fmt::format("geometric mean must be >= 1, got {}", beta));
  }
  ServiceDist d;
  d.family_ = ServiceFamily::kGeometric;
  d.mean_ = beta;
  d.cv_ = geometric_cv(beta);
  d.pmf_.push_back(0.0);
  const double q = 1.0 / beta;
  const double r = 1.0 - q;
  double term = q;
  double rk = 1.0;  // r^(k-1)
  double cum = 0.0;
  while (cum < 1.0 - kPmfTruncation) {
    d.pmf_.push_back(term);
    cum += term;
    term *= r;
    rk *= r;
  }
  // Analytic remainder r^K avoids the cancellation in 1 - sum.
  d.tail_mass_ = rk;
  return d;
}

double mixture_cv(double p, double beta1, double beta2) {
  const double beta = p * beta1 + (1.0 - p) * beta2;
  const double second = 2.0 * (p * beta1 * beta1 + (1.0 - p) * beta2 * beta2) - beta * (1.0 + beta);
  return std::sqrt(second) / beta;
}

MixtureParams solve_mixture(double beta, double cv) {
  if (!(beta > 1.0) || !std::isfinite(beta)) {
    fail(ErrorCode::kInfeasibleCv, fmt::format("geometric mixture needs mean > 1, got {}", beta));
  }
  if (!(cv > geometric_cv(beta))) {
    fail(ErrorCode::kInfeasibleCv,
         fmt::format("cv {} must exceed the geometric cv sqrt(1 - 1/beta) = {}", cv, geometric_cv(beta)));
  }
  const double bm1 = beta - 1.0;
  const double a = 3.0 * beta * bm1 + cv * cv * beta * beta;
  const double disc = a * a - 8.0 * bm1 * bm1 * (cv * cv * beta * beta + beta * (beta + 1.0));
  if (disc < 0.0) {
    fail(ErrorCode::kInfeasibleCv, fmt::format("cv {} with mean {} gives a negative discriminant", cv, beta));
  }
  const double xi = 4.0 * bm1 / (a + std::sqrt(disc));
  const double p = 1.0 - xi * bm1;
  if (!(xi > 0.0) || !(p > 0.0 && p < 1.0)) {
    fail(ErrorCode::kInfeasibleCv, fmt::format("mixing weight p = {} is outside (0, 1)", p));
  }
  if (!(xi <= 1.0)) {
    fail(ErrorCode::kInfeasibleCv, fmt::format("second component mean 1/xi = {} is below 1", 1.0 / xi));
  }
  return MixtureParams{p, 1.0 / p, 1.0 / xi, xi};
}

ServiceDist ServiceDist::geometric_mixture(double beta, double cv) {
  const MixtureParams m = solve_mixture(beta, cv);
  ServiceDist d;
  d.family_ = ServiceFamily::kGeomMixture;
  d.mean_ = beta;
  d.cv_ = cv;
  d.mixture_ = m;
  d.pmf_.push_back(0.0);
  const double q1 = 1.0 / m.beta1, r1 = 1.0 - q1;
  const double q2 = 1.0 / m.beta2, r2 = 1.0 - q2;
  double t1 = m.p * q1, t2 = (1.0 - m.p) * q2;
  double tail1 = m.p, tail2 = 1.0 - m.p;
  double cum = 0.0;
  while (cum < 1.0 - kPmfTruncation) {
    d.pmf_.push_back(t1 + t2);
    cum += t1 + t2;
    t1 *= r1;
    t2 *= r2;
    tail1 *= r1;
    tail2 *= r2;
  }
  d.tail_mass_ = tail1 + tail2;
  return d;
}

std::uint64_t ServiceDist::sample(Stream& rng) const {
  switch (family_) {
    case ServiceFamily::kDeterministic:
      return static_cast<std::uint64_t>(mean_);
    case ServiceFamily::kGeometric:
      return sample_geometric(mean_, rng);
    case ServiceFamily::kGeomMixture: {
      const bool first = rng.uniform() < mixture_->p;
      return sample_geometric(first ? mixture_->beta1 : mixture_->beta2, rng);
    }
  }
  return 1;
}

}  // namespace queueq
