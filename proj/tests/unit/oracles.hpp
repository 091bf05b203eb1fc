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

// Brute-force references used to cross-check the fast recursions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "queueq/service_dist.hpp"

namespace oracle {

// sum_{n <= nmax} Poisson(rate, n) * b^{*n}(k) for k = 0..kmax.
inline std::vector<double> compound_poisson_direct(double rate, const queueq::ServiceDist& dist, std::size_t kmax,
                                                   int nmax = 40) {
  std::vector<double> out(kmax + 1, 0.0);
  std::vector<double> conv(kmax + 1, 0.0);
  conv[0] = 1.0;
  double weight = std::exp(-rate);
  for (int n = 0; n <= nmax; ++n) {
    if (n > 0) {
      weight *= rate / n;
      std::vector<double> next(kmax + 1, 0.0);
      for (std::size_t i = 0; i <= kmax; ++i) {
        if (conv[i] == 0.0) continue;
        for (std::size_t m = 1; i + m <= kmax && m < dist.pmf().size(); ++m) next[i + m] += conv[i] * dist.pmf()[m];
      }
      conv.swap(next);
    }
    for (std::size_t k = 0; k <= kmax; ++k) out[k] += weight * conv[k];
  }
  return out;
}

// Law of V_{t-} by the plain recursion V' = (V + S - 1)^+, no truncation
// tricks beyond a generous fixed support.
inline std::vector<std::vector<double>> workload_direct(const std::vector<double>& p, double lambda,
                                                        const queueq::ServiceDist& dist, std::size_t kmax) {
  std::vector<std::vector<double>> laws;
  std::vector<double> v(kmax + 1, 0.0);
  v[0] = 1.0;
  for (std::size_t t = 0; t < p.size(); ++t) {
    laws.push_back(v);
    const auto s = compound_poisson_direct(lambda * p[t], dist, kmax, 60);
    std::vector<double> next(kmax + 1, 0.0);
    for (std::size_t a = 0; a <= kmax; ++a) {
      if (v[a] == 0.0) continue;
      for (std::size_t b = 0; a + b <= kmax; ++b) {
        const std::size_t level = a + b == 0 ? 0 : a + b - 1;
        next[level] += v[a] * s[b];
      }
    }
    v.swap(next);
  }
  return laws;
}

}  // namespace oracle
