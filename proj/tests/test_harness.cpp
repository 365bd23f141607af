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

#include <atomic>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "qsindy/cli.hpp"
#include "qsindy/harness.hpp"
#include "qsindy/svg_plot.hpp"

using namespace qsindy;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qsindy_test_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr) {
  args.insert(args.begin(), "qsindy");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str() + err.str();
  return code;
}

ExperimentConfig small_sweep(const fs::path& dir) {
  ExperimentConfig c;
  c.systems = {"duffing"};
  c.noise_levels = {0.0, 0.02};
  c.n_trials = 2;
  c.output_dir = dir.string();
  return c;
}

}  // namespace

TEST_CASE("seeds") {
  CHECK(cell_seed(1000, "duffing", 2, 3) == cell_seed(1000, "duffing", 2, 3));
  std::set<std::uint64_t> seen;
  for (const char* sys : {"duffing", "lorenz"}) {
    for (std::size_t s = 0; s < 7; ++s) {
      for (int t = 0; t < 5; ++t) seen.insert(cell_seed(1000, sys, s, t));
    }
  }
  CHECK(seen.size() == 70);
  CHECK(cell_seed(1000, "duffing", 0, 0) != cell_seed(1001, "duffing", 0, 0));
}

TEST_CASE("noise grid and feature map resolution") {
  CHECK(default_noise_grid(duffing()) == std::vector<double>{0, .01, .02, .05, .08, .10, .12});
  const auto g = default_noise_grid(lorenz());
  CHECK(g.size() == 7);
  CHECK(g.back() == doctest::Approx(1.2));
  CHECK(resolve_feature_map("auto", duffing()).kind == FeatureMapKind::ZZ2);
  CHECK(resolve_feature_map("auto", lorenz()).kind == FeatureMapKind::ZZ3);
  CHECK(resolve_feature_map("iqp", duffing()).kind == FeatureMapKind::IQP);
  CHECK(parse_method("orth_q") == Method::OrthQ);
  CHECK(to_string(Method::NaiveQ) == "naive_q");
  CHECK_THROWS_AS(parse_method("bogus"), ConfigError);
  CHECK(parse_pairs("duffing:zz2,lorenz:zz3").size() == 2);
  CHECK_THROWS_AS(parse_pairs("duffing"), ConfigError);
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<std::atomic<int>> hits(50);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) { if (i == 5) throw std::runtime_error("x"); }),
                  std::runtime_error);
}

TEST_CASE("sweep records") {
  const auto dir = scratch("records");
  const auto c = small_sweep(dir);
  const auto records = run_sweep(c);
  REQUIRE(records.size() == 2u * 2u * 4u);
  for (const auto& r : records) {
    CHECK(r.tpr >= 0.0);
    CHECK(r.tpr <= 1.0);
    CHECK(r.seed == cell_seed(c.base_seed, r.system, r.sigma == 0.0 ? 0 : 2, r.trial));
    if (r.method == Method::NaiveQ || r.method == Method::OrthQ) {
      CHECK(std::isfinite(r.r2_q));
      CHECK(std::isfinite(r.frac_var_in_p));
    }
  }
  SUBCASE("orthogonalized fit equals vanilla per trial without noise") {
    for (const auto& v : records) {
      if (v.method != Method::Vanilla || v.sigma != 0.0) continue;
      for (const auto& o : records) {
        if (o.method == Method::OrthQ && o.sigma == 0.0 && o.trial == v.trial) CHECK(o.tpr == v.tpr);
      }
    }
  }
}

TEST_CASE("sweep output is byte-identical across runs and thread counts") {
  const auto a = scratch("repeat_a");
  const auto b = scratch("repeat_b");
  auto ca = small_sweep(a);
  ca.jobs = 1;
  auto cb = small_sweep(b);
  cb.jobs = 3;
  std::ostringstream log;
  REQUIRE(cmd_sweep(ca, log) == 0);
  REQUIRE(cmd_sweep(cb, log) == 0);
  for (const char* f : {"sweep.csv", "sweep_summary.csv"}) {
    CAPTURE(f);
    CHECK(!slurp(a / f).empty());
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK(fs::exists(a / "sweep_timing.csv"));
  CHECK(fs::exists(a / "run_meta.json"));
  CHECK(slurp(a / "sweep.csv").rfind("system,method,feature_map,sigma,trial,seed,tpr,r2_q,frac_var_in_p\n", 0) == 0);
}

TEST_CASE("RBF grid covers the full lattice") {
  ExperimentConfig c;
  c.n_trials = 1;
  const auto grid = run_rbf_grid(c);
  CHECK(grid.cells.size() == 20);
  bool has_corner = false;
  for (const auto& cell : grid.cells) {
    if (cell.gamma_multiplier == 4.0 && cell.landmarks == 24) has_corner = true;
    CHECK(cell.trial_tpr.size() == 1);
  }
  CHECK(has_corner);
}

TEST_CASE("command-line exit codes") {
  const auto dir = scratch("cli");
  std::string text;
  CHECK(run_cli({"--help"}) == cli::kExitOk);
  CHECK(run_cli({"verify", "--pairs", "duffing:zz2", "--out", dir.string()}, &text) == cli::kExitOk);
  CHECK(fs::exists(dir / "verify.csv"));
  CHECK(fs::exists(dir / "verify.json"));
  CHECK(run_cli({"verify", "--pairs", "duffing:zz2", "--corrupt", "--out", dir.string()}) == cli::kExitVerification);
  CHECK(run_cli({"sweep", "--no-such-flag"}) == cli::kExitUsage);
  CHECK(run_cli({"frobnicate"}) == cli::kExitUsage);
  CHECK(run_cli({"--config", (dir / "missing.toml").string(), "verify"}) == cli::kExitUsage);

  std::ofstream(dir / "bad.toml") << "[run]\nunknown_key = 3\n";
  CHECK(run_cli({"--config", (dir / "bad.toml").string(), "verify"}) == cli::kExitUsage);
  CHECK(run_cli({"sweep", "--methods", "bogus", "--out", dir.string()}) == cli::kExitUsage);
}

TEST_CASE("plotting") {
  const auto dir = scratch("plot");
  std::ofstream(dir / "empty.csv") << "system,method,feature_map,sigma,trial,seed,tpr,r2_q,frac_var_in_p\n";
  CHECK_THROWS_AS(plot_csv((dir / "empty.csv").string(), "sweep", dir.string()), SchemaError);
  std::ofstream(dir / "wrong.csv") << "a,b\n1,2\n";
  CHECK_THROWS_AS(plot_csv((dir / "wrong.csv").string(), "sweep", dir.string()), SchemaError);

  auto c = small_sweep(dir);
  c.systems = {"duffing", "lotka_volterra"};
  c.n_trials = 1;
  std::ostringstream log;
  REQUIRE(cmd_sweep(c, log) == 0);
  const auto files = plot_csv((dir / "sweep.csv").string(), "sweep", dir.string());
  CHECK(files.size() == 2);
  for (const auto& f : files) {
    CHECK(fs::exists(f));
    CHECK(slurp(f).find("<svg") != std::string::npos);
  }
  CHECK_THROWS_AS(plot_csv((dir / "sweep.csv").string(), "pie", dir.string()), SchemaError);
}
