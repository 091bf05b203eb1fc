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

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace queueq {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based stream: output n is splitmix64(key + n*gamma). Sub-streams are
// derived by hashing a path of integer ids into the key, so day 17 of a run
// draws the same numbers no matter which thread simulates it.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t seed) noexcept : key_(splitmix64(seed)) {}

  Stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept
      : key_(splitmix64(seed)) {
    for (auto id : path) key_ = splitmix64(key_ ^ splitmix64(id + 0x632be59bd9b4e019ULL));
  }

  Stream derive(std::uint64_t id) const noexcept {
    Stream s(*this);
    s.key_ = splitmix64(key_ ^ splitmix64(id + 0x632be59bd9b4e019ULL));
    s.counter_ = 0;
    return s;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * (++counter_));
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1].
  double uniform_open0() noexcept { return 1.0 - uniform(); }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  // Uniform integer on [0, n), n > 0. Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t n) noexcept {
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  std::uint64_t draws() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Exact Poisson variate. Inversion by sequential search for small means,
// Hormann's PTRS transformed rejection above 30.
std::uint64_t sample_poisson(double mean, Stream& rng);

}  // namespace queueq
