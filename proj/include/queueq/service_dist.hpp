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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "queueq/rng.hpp"

namespace queueq {

// Geometric-type pmfs are materialized up to the first K whose cumulative mass
// reaches 1 - kPmfTruncation; the remainder is kept in tail_mass().
inline constexpr double kPmfTruncation = 1e-12;

enum class ServiceFamily { kDeterministic, kGeometric, kGeomMixture };

std::string_view family_name(ServiceFamily family);
ServiceFamily parse_family(std::string_view name);

// Two-component geometric mixture with p * beta1 == 1.
struct MixtureParams {
  double p;
  double beta1;
  double beta2;
  double xi;
};

// Discrete service-time law on {1, 2, ...}. Immutable once built.
class ServiceDist {
 public:
  static ServiceDist deterministic(double beta);
  static ServiceDist geometric(double beta);
  // Mixture of two geometrics with mean `beta` and coefficient of variation
  // `cv`, pinned down by the extra condition p * beta1 == 1.
  static ServiceDist geometric_mixture(double beta, double cv);

  ServiceFamily family() const noexcept { return family_; }
  double mean() const noexcept { return mean_; }
  double cv() const noexcept { return cv_; }
  double second_moment() const noexcept { return mean_ * mean_ * (1.0 + cv_ * cv_); }
  const std::optional<MixtureParams>& mixture() const noexcept { return mixture_; }

  // pmf()[k] = b(k) for k = 0..K, with pmf()[0] == 0.
  const std::vector<double>& pmf() const noexcept { return pmf_; }
  double pmf_at(std::size_t k) const noexcept { return k < pmf_.size() ? pmf_[k] : 0.0; }
  double tail_mass() const noexcept { return tail_mass_; }
  std::size_t max_support() const noexcept { return pmf_.size() - 1; }

  // Exact draw; geometric branches use inverse transform on the untruncated law.
  std::uint64_t sample(Stream& rng) const;

 private:
  ServiceDist() = default;

  ServiceFamily family_ = ServiceFamily::kDeterministic;
  double mean_ = 1.0;
  double cv_ = 0.0;
  std::optional<MixtureParams> mixture_;
  std::vector<double> pmf_;
  double tail_mass_ = 0.0;
};

// Coefficient of variation of a p/beta1/beta2 mixture with overall mean beta.
double mixture_cv(double p, double beta1, double beta2);

// Solves for the mixture parameters; throws ErrorCode::kInfeasibleCv naming the
// violated constraint.
MixtureParams solve_mixture(double beta, double cv);

}  // namespace queueq
