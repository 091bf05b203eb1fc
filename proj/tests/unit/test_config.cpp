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

#include <string>

#include "queueq/config.hpp"
#include "queueq/error.hpp"

using namespace queueq;

namespace {

std::string config_error(const std::string& text, const Overrides& o = {}) {
  try {
    parse_config(text, o);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidConfig);
    return e.what();
  }
  FAIL("expected an invalid-config error for " << text);
  return {};
}

bool mentions(const std::string& msg, const std::string& key) { return msg.find(key) != std::string::npos; }

}  // namespace

TEST_CASE("defaults") {
  const auto c = parse_config("");
  CHECK(c.game.lambda == 5.0);
  CHECK(c.game.horizon == 20);
  CHECK(c.service.family == "geometric");
  CHECK(c.service.beta == 4.0);
  CHECK(c.solver.epsilon == 1e-4);
  CHECK(c.solver.delta == 1e-3);
  CHECK(c.solver.mode == SolveMode::kBisection);
  CHECK(c.abm.customers == 100);
  CHECK(c.abm.eta == 30.0);
  CHECK(c.abm.days == 20000);
  CHECK(c.abm.checkpoints == std::vector<std::uint64_t>{200, 2000, 20000});
  CHECK(c.output.csv);
  CHECK(c.output.json);
  CHECK(parse_config("{}").hash() == c.hash());
}

TEST_CASE("fields are read") {
  const auto c = parse_config(R"({"game":{"lambda":3,"T":10},"service":{"family":"geom_mixture","beta":3,"cv":1.6},
    "solver":{"mode":"grid","epsilon":1e-3},"abm":{"N":50,"days":300,"seed":9,"eta":1},"output":{"formats":["csv"]}})");
  CHECK(c.game.lambda == 3.0);
  CHECK(c.game.horizon == 10);
  CHECK(c.service.build().family() == ServiceFamily::kGeomMixture);
  CHECK(c.solver.mode == SolveMode::kGrid);
  CHECK(c.abm.checkpoints == std::vector<std::uint64_t>{200});
  CHECK(c.abm.seed == 9);
  CHECK_FALSE(c.output.json);
  CHECK(c.abm_config(2).seed == 11);
}

TEST_CASE("errors name the offending key") {
  CHECK(mentions(config_error(R"({"gmae":{}})"), "gmae"));
  CHECK(mentions(config_error(R"({"game":{"lamda":5}})"), "game.lamda"));
  CHECK(mentions(config_error(R"({"game":{"lambda":0}})"), "game.lambda"));
  CHECK(mentions(config_error(R"({"game":{"lambda":"five"}})"), "game.lambda"));
  CHECK(mentions(config_error(R"({"game":{"T":-2}})"), "game.T"));
  CHECK(mentions(config_error(R"({"service":{"family":"weibull"}})"), "service"));
  CHECK(mentions(config_error(R"({"service":{"family":"geom_mixture","beta":3,"cv":0.5}})"), "service"));
  CHECK(mentions(config_error(R"({"solver":{"mode":"newton"}})"), "solver.mode"));
  CHECK(mentions(config_error(R"({"solver":{"delta":2}})"), "solver"));
  CHECK(mentions(config_error(R"({"abm":{"days":10,"checkpoints":[20]}})"), "abm"));
  CHECK(mentions(config_error(R"({"output":{"formats":["xml"]}})"), "output.formats"));
  CHECK(mentions(config_error(R"({"table1":{"cases":[4]}})"), "table1.cases"));
  CHECK(mentions(config_error(R"({"game":{"lambda":5})"), "JSON"));
  CHECK(mentions(config_error("[1,2]"), "object"));
}

TEST_CASE("overrides") {
  Overrides o;
  o.out_dir = "elsewhere";
  o.seed = 77;
  o.mode = "grid";
  o.format = "json";
  o.checkpoints = "5,10";
  const auto c = parse_config(R"({"abm":{"days":10}})", o);
  CHECK(c.output.directory == "elsewhere");
  CHECK(c.abm.seed == 77);
  CHECK(c.verify.seed == 77);
  CHECK(c.solver.mode == SolveMode::kGrid);
  CHECK_FALSE(c.output.csv);
  CHECK(c.abm.checkpoints == std::vector<std::uint64_t>{5, 10});
  Overrides bad;
  bad.checkpoints = "5,x";
  CHECK(mentions(config_error("", bad), "abm.checkpoints"));
}

TEST_CASE("hash ignores the output section and tracks the rest") {
  const auto a = parse_config(R"({"output":{"directory":"a"}})");
  const auto b = parse_config(R"({"output":{"directory":"b"}})");
  const auto c = parse_config(R"({"game":{"lambda":4}})");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != c.hash());
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}
