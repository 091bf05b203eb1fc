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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "queueq/abm.hpp"
#include "queueq/equilibrium.hpp"
#include "queueq/service_dist.hpp"

namespace queueq {

struct ServiceSpec {
  std::string family = "geometric";
  double beta = 4.0;
  double cv = 0.0;  // used by geom_mixture only

  ServiceDist build() const;
};

struct GameSection {
  double lambda = 5.0;
  std::size_t horizon = 20;
};

struct AbmSection {
  std::size_t customers = 100;
  double eta = 30.0;
  std::uint64_t days = 20000;
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> checkpoints{200, 2000, 20000};
  std::size_t replications = 1;  // replication r runs with seed + r
  bool argmin_visited_only = false;
};

struct OutputSection {
  std::string directory = "out";
  bool csv = true;
  bool json = true;
};

struct Table1Section {
  std::vector<double> betas{3.0, 4.0, 5.0};
  std::vector<int> cases{1, 2, 3};
  // Mixture cv per beta; empty means 1.3 + 0.1 * beta.
  std::vector<double> mixture_cv;
};

struct GscanSection {
  double start = 0.01;
  double stop = 0.99;
  double step = 0.01;
  std::vector<double> points;  // overrides the range when non-empty
};

struct VerifySection {
  double tol = 0.0;  // 0 means 10 * delta * lambda * beta
  double mass_threshold = 1e-6;
  std::uint64_t monte_carlo_days = 0;
  std::uint64_t seed = 1;
};

struct RunConfig {
  GameSection game;
  ServiceSpec service;
  SolverConfig solver;
  AbmSection abm;
  OutputSection output;
  Table1Section table1;
  GscanSection gscan;
  VerifySection verify;

  nlohmann::json to_json() const;
  // FNV-1a of the canonical JSON, output section excluded.
  std::uint64_t hash() const;
  AbmConfig abm_config(std::size_t replication = 0) const;
};

// Command-line overrides applied on top of the file before validation.
struct Overrides {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::string> format;  // csv | json
  std::optional<std::string> checkpoints;  // comma separated
};

// Parses and validates; every failure is ErrorCode::kInvalidConfig with the
// offending key in the message. Unknown keys are rejected.
RunConfig parse_config(std::string_view text, const Overrides& overrides = {});
RunConfig load_config_file(const std::string& path, const Overrides& overrides = {});

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace queueq
