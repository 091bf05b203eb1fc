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

// queueq command-line front end. Links only against the C API.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "queueq/queueq.h"

namespace {

int exit_code(qq_status status) {
  switch (status) {
    case QQ_OK: return 0;
    case QQ_INVALID_ARGUMENT:
    case QQ_INVALID_CONFIG:
    case QQ_INFEASIBLE_CV:
    case QQ_CAPACITY_EXCEEDED:
    case QQ_INVALID_INPUT: return 2;
    case QQ_NO_ROOT: return 3;
    case QQ_VERIFICATION_FAILED: return 4;
    default: return 1;
  }
}

std::optional<std::string> read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium arrival times for a discrete-time single-server Poisson queueing game"};
  app.set_version_flag("--version", std::string(qq_version()));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::string mode;
  std::string format;
  std::string checkpoints;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "master RNG seed");
  app.add_option("--mode", mode, "solver mode")->check(CLI::IsMember({"grid", "bisection"}));
  app.add_option("--format", format, "emit only csv or only json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--checkpoints", checkpoints, "comma-separated ABM checkpoint days");

  auto* equilibrium = app.add_subcommand("equilibrium", "solve for the equilibrium arrival-time distribution");
  auto* table1 = app.add_subcommand("table1", "equilibrium waits over the service-family x mean grid");
  auto* abm = app.add_subcommand("abm", "run the agent-based learning model");
  auto* gscan = app.add_subcommand("gscan", "tabulate G(x0) and check monotonicity");
  auto* verify = app.add_subcommand("verify", "check the equilibrium condition for a given distribution");
  std::string p_file;
  verify->add_option("p_file", p_file, "equilibrium.json, JSON array, or CSV with a p_t column")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  std::string config_text;
  if (!config_path.empty()) {
    auto text = read_text(config_path);
    if (!text) {
      std::cerr << "error: cannot read config file '" << config_path << "'\n";
      return 2;
    }
    config_text = std::move(*text);
  }

  qq_overrides ov{};
  if (!out_dir.empty()) ov.out_dir = out_dir.c_str();
  if (seed_opt->count() > 0) {
    ov.has_seed = 1;
    ov.seed = seed;
  }
  if (!mode.empty()) ov.mode = mode.c_str();
  if (!format.empty()) ov.format = format.c_str();
  if (!checkpoints.empty()) ov.checkpoints = checkpoints.c_str();

  char* report = nullptr;
  qq_status status = QQ_INTERNAL_ERROR;
  const char* cfg = config_text.c_str();
  if (*equilibrium) status = qq_cmd_equilibrium(cfg, &ov, &report);
  else if (*table1) status = qq_cmd_table1(cfg, &ov, &report);
  else if (*abm) status = qq_cmd_abm(cfg, &ov, &report);
  else if (*gscan) status = qq_cmd_gscan(cfg, &ov, &report);
  else if (*verify) status = qq_cmd_verify(cfg, &ov, p_file.c_str(), &report);

  if (status == QQ_OK || status == QQ_VERIFICATION_FAILED) {
    if (report) std::fputs(report, stdout);
  } else {
    std::fprintf(stderr, "error (%s): %s\n", qq_status_name(status), report ? report : qq_last_error());
  }
  qq_string_free(report);
  return exit_code(status);
}
