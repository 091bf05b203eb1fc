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

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "queueq/commands.hpp"
#include "queueq/config.hpp"
#include "queueq/error.hpp"

using namespace queueq;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("queueq_cmd_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

RunConfig config_in(const fs::path& dir, const std::string& text = "") {
  Overrides o;
  o.out_dir = dir.string();
  return parse_config(text, o);
}

std::size_t data_rows(const std::string& csv) {
  std::size_t n = 0;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') ++n;
  return n - 1;  // column header
}

}  // namespace

TEST_CASE("equilibrium writes json and csv") {
  const auto dir = scratch("eq");
  const auto cfg = config_in(dir, R"({"service":{"family":"deterministic","beta":3}})");
  const auto rep = cmd_equilibrium(cfg);
  CHECK(rep.status == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "equilibrium.json"));
  CHECK(std::abs(j.at("w_star").get<double>() - 2.2) <= 0.05);
  CHECK(j.at("p_star").size() == 21);
  CHECK(j.contains("x0"));
  CHECK(j.contains("residual"));
  CHECK(j.at("mode") == "bisection");
  const auto csv = slurp(dir / "profile.csv");
  char hash[32];
  std::snprintf(hash, sizeof hash, "config=%016llx", static_cast<unsigned long long>(cfg.hash()));
  CHECK(csv.rfind("# queueq ", 0) == 0);
  CHECK(csv.find(hash) != std::string::npos);
  CHECK(data_rows(csv) == 21);
}

TEST_CASE("verify round-trips the solver output exactly") {
  const auto dir = scratch("roundtrip");
  const auto cfg = config_in(dir, R"({"service":{"family":"geom_mixture","beta":4,"cv":1.7}})");
  cmd_equilibrium(cfg);
  const auto eq = nlohmann::json::parse(slurp(dir / "equilibrium.json"));
  const auto rep = cmd_verify(cfg, (dir / "equilibrium.json").string());
  CHECK(rep.status == 0);
  const auto v = nlohmann::json::parse(slurp(dir / "verify.json"));
  CHECK(v.at("is_equilibrium").get<bool>());
  const auto& w1 = eq.at("w");
  const auto& w2 = v.at("w");
  REQUIRE(w1.size() == w2.size());
  for (std::size_t t = 0; t < w1.size(); ++t) CHECK(std::abs(w1[t].get<double>() - w2[t].get<double>()) <= 1e-12);

  // also from the CSV column
  const auto from_csv = read_arrival_file((dir / "profile.csv").string());
  for (std::size_t t = 0; t < from_csv.slots(); ++t) CHECK(from_csv[t] == eq.at("p_star")[t].get<double>());
}

TEST_CASE("verify rejects uniform arrivals and bad input") {
  const auto dir = scratch("verify");
  const auto cfg = config_in(dir, R"({"service":{"family":"geometric","beta":5}})");
  spit(dir / "uniform.json", nlohmann::json(std::vector<double>(21, 1.0 / 21)).dump());
  const auto rep = cmd_verify(cfg, (dir / "uniform.json").string());
  CHECK(rep.status == 4);
  CHECK(rep.text.find("violating slots") != std::string::npos);
  CHECK_FALSE(nlohmann::json::parse(slurp(dir / "verify.json")).at("violating_slots").empty());

  spit(dir / "short.json", "[0.5, 0.4]");
  try {
    cmd_verify(cfg, (dir / "short.json").string());
    FAIL("expected invalid input");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidInput);
  }
  spit(dir / "p.csv", "t,p_t\n0,0.25\n1,0.75\n");
  CHECK(read_arrival_file((dir / "p.csv").string())[1] == 0.75);
}

TEST_CASE("verify with simulation") {
  const auto dir = scratch("verify_mc");
  const auto cfg = config_in(dir, R"({"game":{"T":6},"service":{"family":"geometric","beta":2},
                                      "verify":{"monte_carlo_days":20000,"seed":3}})");
  cmd_equilibrium(cfg);
  const auto rep = cmd_verify(cfg, (dir / "equilibrium.json").string());
  CHECK(rep.status == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "verify.json")).at("monte_carlo").at("passed").get<bool>());
}

TEST_CASE("table1 defaults, restriction and custom betas") {
  const auto dir = scratch("table1");
  cmd_table1(config_in(dir));
  const auto csv = slurp(dir / "table1.csv");
  CHECK(data_rows(csv) == 9);
  const auto j = nlohmann::json::parse(slurp(dir / "table1.json"));
  for (const auto& c : j.at("cells")) CHECK(c.contains("reference_w_star"));

  const auto one = scratch("table1_case1");
  const auto cells = compute_table1(config_in(one, R"({"table1":{"cases":[1]}})"));
  CHECK(cells.size() == 3);
  for (const auto& c : cells) CHECK(c.service_case == 1);

  const auto custom = compute_table1(config_in(one, R"({"table1":{"betas":[2]}})"));
  CHECK(custom.size() == 3);
  for (const auto& c : custom) CHECK_FALSE(c.reference.has_value());
  CHECK(table1_reference(4, 2) == 5.7);
}

TEST_CASE("gscan output") {
  const auto dir = scratch("gscan");
  const auto cfg = config_in(dir, R"({"service":{"family":"geometric","beta":3}})");
  const auto rep = cmd_gscan(cfg);
  const auto csv = slurp(dir / "gscan.csv");
  CHECK(data_rows(csv) == 99);
  CHECK(rep.text.find("0 non-monotone") != std::string::npos);

  const auto zero = cmd_gscan(config_in(dir, R"({"gscan":{"points":[0]}})"));
  const auto z = slurp(dir / "gscan.csv");
  CHECK(data_rows(z) == 1);
  CHECK(z.find("\n0,0,0,0\n") != std::string::npos);

  // a dense grid around the root brackets the solver's x0
  const auto eq_dir = scratch("gscan_eq");
  auto eq_cfg = config_in(eq_dir, R"({"service":{"family":"geometric","beta":3}})");
  cmd_equilibrium(eq_cfg);
  const double x0 = nlohmann::json::parse(slurp(eq_dir / "equilibrium.json")).at("x0").get<double>();
  const auto dense = cmd_gscan(config_in(dir, R"({"service":{"family":"geometric","beta":3},
                                                  "gscan":{"start":0.3,"stop":0.5,"step":0.001}})"));
  const auto at = dense.text.find('[');
  REQUIRE(at != std::string::npos);
  double lo = 0, hi = 0;
  REQUIRE(std::sscanf(dense.text.c_str() + at, "[%lf, %lf]", &lo, &hi) == 2);
  CHECK(lo <= x0);
  CHECK(x0 <= hi);
}

TEST_CASE("abm writes checkpoints and is reproducible") {
  const auto a = scratch("abm_a");
  const auto b = scratch("abm_b");
  const std::string text = R"({"abm":{"days":2000,"replications":2}})";
  auto ca = config_in(a, text);
  auto cb = config_in(b, text);
  cmd_abm(ca);
  cmd_abm(cb);
  for (const char* f : {"trace.csv", "summary.csv", "checkpoint_200.csv", "checkpoint_2000.csv", "abm.json"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK(slurp(a / "trace.csv").find("seed=1") != std::string::npos);

  const auto one = scratch("abm_one");
  cmd_abm(config_in(one, R"({"abm":{"days":1}})"));
  const auto cp = slurp(one / "checkpoint_1.csv");
  CHECK(data_rows(cp) == 21);
  const auto j = nlohmann::json::parse(slurp(one / "abm.json"));
  for (const auto& x : j.at("averaged")[0].at("p_bar")) CHECK(x.get<double>() == doctest::Approx(1.0 / 21));
}

TEST_CASE("format selection") {
  const auto dir = scratch("formats");
  cmd_equilibrium(config_in(dir, R"({"output":{"formats":["json"]}})"));
  CHECK(fs::exists(dir / "equilibrium.json"));
  CHECK_FALSE(fs::exists(dir / "profile.csv"));
}
