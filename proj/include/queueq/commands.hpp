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

#include <optional>
#include <string>
#include <vector>

#include "queueq/config.hpp"
#include "queueq/equilibrium.hpp"

namespace queueq {

// Outcome of one CLI command. status is 0 on success and 4 when a
// verification ran but did not pass; hard failures are thrown as Error.
struct CommandReport {
  int status = 0;
  std::string text;
  std::vector<std::string> files;
};

CommandReport cmd_equilibrium(const RunConfig& cfg);
CommandReport cmd_table1(const RunConfig& cfg);
CommandReport cmd_abm(const RunConfig& cfg);
CommandReport cmd_gscan(const RunConfig& cfg);
CommandReport cmd_verify(const RunConfig& cfg, const std::string& p_file);

struct Table1Cell {
  double beta;
  int service_case;  // 1 deterministic, 2 geometric, 3 geometric mixture
  ServiceSpec service;
  double cv;
  EquilibriumResult result;
  std::optional<double> reference;  // reference w* for the standard grid
};

// Reference equilibrium waits at lambda = 5, T = 20 for beta in {3, 4, 5},
// with mixture cv 1.6 / 1.7 / 1.8.
std::optional<double> table1_reference(double beta, int service_case);
ServiceSpec table1_service(double beta, int service_case, double mixture_cv);
std::vector<Table1Cell> compute_table1(const RunConfig& cfg);

// Reads an arrival distribution from an equilibrium.json (p_star), a bare JSON
// array, or a CSV with a p_t column. Throws kInvalidInput when the values do
// not form a probability vector.
ArrivalDist read_arrival_file(const std::string& path);

// "# queueq <version> config=<hash> seed=<seed>"
std::string csv_header(const RunConfig& cfg, std::uint64_t seed);
std::string format_double(double x);

}  // namespace queueq
