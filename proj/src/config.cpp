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

#include "queueq/config.hpp"

#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <set>
#include <sstream>

#include "queueq/error.hpp"

namespace queueq {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  fail(ErrorCode::kInvalidConfig, fmt::format("config key '{}': {}", key, what));
}

void reject_unknown(const json& obj, const std::string& prefix, const std::set<std::string>& allowed) {
  if (!obj.is_object()) bad(prefix, "must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) bad(prefix.empty() ? key : prefix + "." + key, "unknown key");
  }
}

double get_number(const json& obj, const std::string& section, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) bad(section + "." + key, "must be a number");
  return v.get<double>();
}

std::uint64_t get_count(const json& obj, const std::string& section, const char* key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0)) {
    bad(section + "." + key, "must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

bool get_bool(const json& obj, const std::string& section, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) bad(section + "." + key, "must be true or false");
  return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& section, const char* key, std::string fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) bad(section + "." + key, "must be a string");
  return v.get<std::string>();
}

template <typename T>
std::vector<T> get_list(const json& obj, const std::string& section, const char* key, std::vector<T> fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_array()) bad(section + "." + key, "must be an array");
  std::vector<T> out;
  for (const auto& e : v) {
    if constexpr (std::is_floating_point_v<T>) {
      if (!e.is_number()) bad(section + "." + key, "entries must be numbers");
    } else {
      if (!e.is_number_integer() || e.get<long long>() < 0) bad(section + "." + key, "entries must be nonnegative integers");
    }
    out.push_back(e.get<T>());
  }
  return out;
}

std::vector<std::uint64_t> parse_checkpoint_list(std::string_view text) {
  std::vector<std::uint64_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto token = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size() || token.empty()) {
      bad("abm.checkpoints", fmt::format("cannot parse '{}' as a day number", token));
    }
    out.push_back(value);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

void apply_overrides(json& root, const Overrides& o) {
  if (!root.is_object()) bad("", "top level must be a JSON object");
  auto section = [&root](const char* name) -> json& {
    if (!root.contains(name)) root[name] = json::object();
    return root[name];
  };
  if (o.out_dir) section("output")["directory"] = *o.out_dir;
  if (o.seed) {
    section("abm")["seed"] = *o.seed;
    section("verify")["seed"] = *o.seed;
  }
  if (o.mode) section("solver")["mode"] = *o.mode;
  if (o.format) {
    if (*o.format != "csv" && *o.format != "json") bad("output.formats", fmt::format("unknown format '{}'", *o.format));
    section("output")["formats"] = json::array({*o.format});
  }
  if (o.checkpoints) section("abm")["checkpoints"] = parse_checkpoint_list(*o.checkpoints);
}

}  // namespace

ServiceDist ServiceSpec::build() const {
  switch (parse_family(family)) {
    case ServiceFamily::kDeterministic: return ServiceDist::deterministic(beta);
    case ServiceFamily::kGeometric: return ServiceDist::geometric(beta);
    case ServiceFamily::kGeomMixture: return ServiceDist::geometric_mixture(beta, cv);
  }
  fail(ErrorCode::kInvalidParameter, "unreachable service family");
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

nlohmann::json RunConfig::to_json() const {
  json formats = json::array();
  if (output.csv) formats.push_back("csv");
  if (output.json) formats.push_back("json");
  return json{
      {"game", {{"lambda", game.lambda}, {"T", game.horizon}}},
      {"service", {{"family", service.family}, {"beta", service.beta}, {"cv", service.cv}}},
      {"solver",
       {{"mode", std::string(mode_name(solver.mode))},
        {"epsilon", solver.epsilon},
        {"delta", solver.delta},
        {"tol", solver.tol},
        {"monotonicity_step", solver.monotonicity_step},
        {"report_all_roots", solver.report_all_roots}}},
      {"abm",
       {{"N", abm.customers},
        {"eta", abm.eta},
        {"days", abm.days},
        {"seed", abm.seed},
        {"checkpoints", abm.checkpoints},
        {"replications", abm.replications},
        {"argmin_visited_only", abm.argmin_visited_only}}},
      {"output", {{"directory", output.directory}, {"formats", formats}}},
      {"table1", {{"betas", table1.betas}, {"cases", table1.cases}, {"mixture_cv", table1.mixture_cv}}},
      {"gscan", {{"start", gscan.start}, {"stop", gscan.stop}, {"step", gscan.step}, {"points", gscan.points}}},
      {"verify",
       {{"tol", verify.tol},
        {"mass_threshold", verify.mass_threshold},
        {"monte_carlo_days", verify.monte_carlo_days},
        {"seed", verify.seed}}},
  };
}

std::uint64_t RunConfig::hash() const {
  json j = to_json();
  j.erase("output");
  return fnv1a64(j.dump());
}

AbmConfig RunConfig::abm_config(std::size_t replication) const {
  AbmConfig c;
  c.customers = abm.customers;
  c.lambda = game.lambda;
  c.horizon = game.horizon;
  c.eta = abm.eta;
  c.days = abm.days;
  c.seed = abm.seed + replication;
  c.checkpoints = abm.checkpoints;
  c.options.argmin_visited_only = abm.argmin_visited_only;
  return c;
}

RunConfig parse_config(std::string_view text, const Overrides& overrides) {
  json root;
  try {
    root = text.empty() ? json::object() : json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kInvalidConfig, fmt::format("config is not valid JSON: {}", e.what()));
  }
  apply_overrides(root, overrides);
  reject_unknown(root, "", {"game", "service", "solver", "abm", "output", "table1", "gscan", "verify"});

  RunConfig c;
  const json empty = json::object();
  auto sec = [&](const char* name) -> const json& { return root.contains(name) ? root.at(name) : empty; };

  const json& game = sec("game");
  reject_unknown(game, "game", {"lambda", "T"});
  c.game.lambda = get_number(game, "game", "lambda", c.game.lambda);
  c.game.horizon = get_count(game, "game", "T", c.game.horizon);
  if (!(c.game.lambda > 0.0)) bad("game.lambda", "must be > 0");
  if (c.game.horizon < 1) bad("game.T", "must be >= 1");

  const json& service = sec("service");
  reject_unknown(service, "service", {"family", "beta", "cv"});
  c.service.family = get_string(service, "service", "family", c.service.family);
  c.service.beta = get_number(service, "service", "beta", c.service.beta);
  c.service.cv = get_number(service, "service", "cv", c.service.cv);
  try {
    (void)c.service.build();
  } catch (const Error& e) {
    bad("service", e.what());
  }

  const json& solver = sec("solver");
  reject_unknown(solver, "solver", {"mode", "epsilon", "delta", "tol", "monotonicity_step", "report_all_roots"});
  const auto mode = get_string(solver, "solver", "mode", std::string(mode_name(c.solver.mode)));
  try {
    c.solver.mode = parse_mode(mode);
  } catch (const Error& e) {
    bad("solver.mode", e.what());
  }
  c.solver.epsilon = get_number(solver, "solver", "epsilon", c.solver.epsilon);
  c.solver.delta = get_number(solver, "solver", "delta", c.solver.delta);
  c.solver.tol = get_number(solver, "solver", "tol", c.solver.tol);
  c.solver.monotonicity_step = get_number(solver, "solver", "monotonicity_step", c.solver.monotonicity_step);
  c.solver.report_all_roots = get_bool(solver, "solver", "report_all_roots", c.solver.report_all_roots);
  try {
    c.solver.validate();
  } catch (const Error& e) {
    bad("solver", e.what());
  }

  const json& abm = sec("abm");
  reject_unknown(abm, "abm", {"N", "eta", "days", "seed", "checkpoints", "replications", "argmin_visited_only"});
  c.abm.customers = get_count(abm, "abm", "N", c.abm.customers);
  c.abm.eta = get_number(abm, "abm", "eta", c.abm.eta);
  c.abm.days = get_count(abm, "abm", "days", c.abm.days);
  c.abm.seed = get_count(abm, "abm", "seed", c.abm.seed);
  c.abm.checkpoints = get_list<std::uint64_t>(abm, "abm", "checkpoints", c.abm.checkpoints);
  c.abm.replications = get_count(abm, "abm", "replications", c.abm.replications);
  c.abm.argmin_visited_only = get_bool(abm, "abm", "argmin_visited_only", c.abm.argmin_visited_only);
  if (c.abm.replications < 1) bad("abm.replications", "must be >= 1");
  if (!abm.contains("checkpoints") && !overrides.checkpoints) {
    // Default checkpoints that lie beyond a shortened run are dropped.
    std::erase_if(c.abm.checkpoints, [&](std::uint64_t d) { return d > c.abm.days; });
    if (c.abm.checkpoints.empty()) c.abm.checkpoints.push_back(c.abm.days);
  }
  try {
    c.abm_config().validate();
  } catch (const Error& e) {
    bad("abm", e.what());
  }

  const json& output = sec("output");
  reject_unknown(output, "output", {"directory", "formats"});
  c.output.directory = get_string(output, "output", "directory", c.output.directory);
  if (output.contains("formats")) {
    const auto& f = output.at("formats");
    if (!f.is_array() || f.empty()) bad("output.formats", "must be a non-empty array of \"csv\"/\"json\"");
    c.output.csv = c.output.json = false;
    for (const auto& e : f) {
      if (e == "csv") c.output.csv = true;
      else if (e == "json") c.output.json = true;
      else bad("output.formats", fmt::format("unknown format {}", e.dump()));
    }
  }

  const json& table1 = sec("table1");
  reject_unknown(table1, "table1", {"betas", "cases", "mixture_cv"});
  c.table1.betas = get_list<double>(table1, "table1", "betas", c.table1.betas);
  if (table1.contains("cases")) {
    c.table1.cases.clear();
    for (auto v : get_list<std::uint64_t>(table1, "table1", "cases", {})) c.table1.cases.push_back(static_cast<int>(v));
  }
  c.table1.mixture_cv = get_list<double>(table1, "table1", "mixture_cv", c.table1.mixture_cv);
  if (c.table1.betas.empty()) bad("table1.betas", "must not be empty");
  for (int k : c.table1.cases) {
    if (k < 1 || k > 3) bad("table1.cases", fmt::format("case {} is not 1, 2 or 3", k));
  }
  if (!c.table1.mixture_cv.empty() && c.table1.mixture_cv.size() != c.table1.betas.size()) {
    bad("table1.mixture_cv", "must have one entry per beta");
  }

  const json& gscan = sec("gscan");
  reject_unknown(gscan, "gscan", {"start", "stop", "step", "points"});
  c.gscan.start = get_number(gscan, "gscan", "start", c.gscan.start);
  c.gscan.stop = get_number(gscan, "gscan", "stop", c.gscan.stop);
  c.gscan.step = get_number(gscan, "gscan", "step", c.gscan.step);
  c.gscan.points = get_list<double>(gscan, "gscan", "points", c.gscan.points);
  if (c.gscan.points.empty()) {
    if (!(c.gscan.step > 0.0)) bad("gscan.step", "must be > 0");
    if (!(c.gscan.start >= 0.0) || !(c.gscan.stop >= c.gscan.start)) bad("gscan", "need 0 <= start <= stop");
  }
  for (double x : c.gscan.points) {
    if (!(x >= 0.0)) bad("gscan.points", "entries must be >= 0");
  }

  const json& verify = sec("verify");
  reject_unknown(verify, "verify", {"tol", "mass_threshold", "monte_carlo_days", "seed"});
  c.verify.tol = get_number(verify, "verify", "tol", c.verify.tol);
  c.verify.mass_threshold = get_number(verify, "verify", "mass_threshold", c.verify.mass_threshold);
  c.verify.monte_carlo_days = get_count(verify, "verify", "monte_carlo_days", c.verify.monte_carlo_days);
  c.verify.seed = get_count(verify, "verify", "seed", c.verify.seed);
  if (!(c.verify.tol >= 0.0)) bad("verify.tol", "must be >= 0");
  if (!(c.verify.mass_threshold >= 0.0)) bad("verify.mass_threshold", "must be >= 0");
  return c;
}

RunConfig load_config_file(const std::string& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kInvalidConfig, fmt::format("cannot read config file '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

}  // namespace queueq
