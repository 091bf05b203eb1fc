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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "queueq_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(QUEUEQ_CLI_PATH) + " " + args + " > " + (kRoot / "stdout.txt").string() +
                          " 2> " + (kRoot / "stderr.txt").string();
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write(const std::string& name, const std::string& text) {
  fs::create_directories(kRoot);
  const fs::path p = kRoot / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

}  // namespace

TEST_CASE("exit codes") {
  fs::remove_all(kRoot);
  fs::create_directories(kRoot);
  CHECK(run("equilibrium --out " + (kRoot / "ok").string()) == 0);
  CHECK(run("equilibrium --config " + write("bad.json", "{\"game\":{\"lambda\":0}}").string()) == 2);
  CHECK(slurp(kRoot / "stderr.txt").find("game.lambda") != std::string::npos);
  CHECK(run("equilibrium --config " + write("junk.json", "{not json").string()) == 2);
  CHECK(run("equilibrium --config " + (kRoot / "missing.json").string()) == 2);
  CHECK(run("equilibrium --mode newton") == 2);
  const auto noroot = write("noroot.json", R"({"solver":{"mode":"grid","epsilon":0.1,"delta":1e-9}})");
  CHECK(run("equilibrium --config " + noroot.string() + " --out " + (kRoot / "nr").string()) == 3);
  const auto uni = write("uniform.json", "[0.2,0.2,0.2,0.2,0.2]");
  const auto small = write("small.json", R"({"game":{"T":4},"service":{"family":"geometric","beta":5}})");
  CHECK(run("verify " + uni.string() + " --config " + small.string() + " --out " + (kRoot / "v").string()) == 4);
  const auto half = write("half.json", "[0.2,0.2]");
  CHECK(run("verify " + half.string() + " --out " + (kRoot / "v").string()) == 2);
  CHECK(run("") == 2);
}

TEST_CASE("flags reach the run") {
  const auto out = kRoot / "abm";
  CHECK(run("abm --config " + write("abm.json", R"({"abm":{"days":30}})").string() + " --out " + out.string() +
            " --seed 5 --checkpoints 10,30 --format csv") == 0);
  CHECK(fs::exists(out / "checkpoint_10.csv"));
  CHECK(fs::exists(out / "checkpoint_30.csv"));
  CHECK_FALSE(fs::exists(out / "abm.json"));
  CHECK(slurp(out / "trace.csv").find("seed=5") != std::string::npos);
}

TEST_CASE("re-runs are byte-identical") {
  const auto cfg = write("det.json", R"({"abm":{"days":300,"replications":2},"verify":{"monte_carlo_days":2000}})");
  for (const std::string cmd : {"equilibrium", "table1", "abm", "gscan"}) {
    const auto a = kRoot / ("det_a_" + cmd);
    const auto b = kRoot / ("det_b_" + cmd);
    REQUIRE(run(cmd + " --config " + cfg.string() + " --out " + a.string()) == 0);
    const std::string out_a = slurp(kRoot / "stdout.txt");
    REQUIRE(run(cmd + " --config " + cfg.string() + " --out " + b.string()) == 0);
    CHECK(out_a == slurp(kRoot / "stdout.txt"));
    for (const auto& entry : fs::directory_iterator(a)) {
      CAPTURE(entry.path());
      CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
    }
  }
}
