// Copyright 2026 The qsindy Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "qsindy/config.hpp"
#include "qsindy/harness.hpp"

using namespace qsindy;

TEST_CASE("parsing") {
  const auto t = ConfigTable::parse(R"(
# comment
top = 3
[run]
base_seed = 42   # trailing comment
out = "some # dir"
[sweep]
systems = ["duffing", "lorenz"]
noise_levels = [0.0, 1e-2, 0.05]
enabled = true
)");
  CHECK(t.get_int("top", 0) == 3);
  CHECK(t.get_int("run.base_seed", 0) == 42);
  CHECK(t.get_string("run.out", "") == "some # dir");
  CHECK(t.get_strings("sweep.systems", {}) == std::vector<std::string>{"duffing", "lorenz"});
  CHECK(t.get_doubles("sweep.noise_levels", {}) == std::vector<double>{0.0, 0.01, 0.05});
  CHECK(t.get_bool("sweep.enabled", false));
  CHECK(t.get_double("missing.key", 2.5) == 2.5);
  CHECK(t.keys_under("sweep").size() == 3);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(ConfigTable::parse("a = 1\na = 2"), ConfigError);
  CHECK_THROWS_AS(ConfigTable::parse("a 1"), ConfigError);
  CHECK_THROWS_AS(ConfigTable::parse("[open"), ConfigError);
  CHECK_THROWS_AS(ConfigTable::parse("a = \"unterminated"), ConfigError);
  CHECK_THROWS_AS(ConfigTable::parse("a = [1, 2"), ConfigError);
  const auto t = ConfigTable::parse("a = \"text\"\nb = 1.5");
  CHECK_THROWS_AS(t.get_double("a", 0), ConfigError);
  CHECK_THROWS_AS(t.get_int("b", 0), ConfigError);
  CHECK_THROWS_AS(ConfigTable::load("/nonexistent/qsindy.toml"), ConfigError);
}

TEST_CASE("experiment config from a table") {
  const auto t = ConfigTable::parse(R"(
[run]
base_seed = 7
trials = 2
[sweep]
systems = ["lotka_volterra"]
methods = ["vanilla", "orth_q"]
[diagnose]
reference_sigma.duffing = 0.05
)");
  const auto c = ExperimentConfig::from_table(t);
  CHECK(c.base_seed == 7);
  CHECK(c.n_trials == 2);
  CHECK(c.systems == std::vector<std::string>{"lotka_volterra"});
  CHECK(c.methods == std::vector<Method>{Method::Vanilla, Method::OrthQ});
  CHECK(c.reference_sigma.at("duffing") == 0.05);
  CHECK(c.reference_sigma.at("lorenz") == 0.2);
  CHECK_NOTHROW(c.validate());

  CHECK_THROWS_AS(ExperimentConfig::from_table(ConfigTable::parse("[run]\nbogus = 1")), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_table(ConfigTable::parse("[sweep]\nmethods = [\"nope\"]")), ConfigError);
  ExperimentConfig bad;
  bad.n_trials = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("shipped default config loads") {
  const std::filesystem::path path = std::filesystem::path(QSINDY_SOURCE_DIR) / "configs" / "default.toml";
  const auto c = ExperimentConfig::from_table(ConfigTable::load(path.string()));
  CHECK_NOTHROW(c.validate());
  CHECK(c.base_seed == 1000);
}
