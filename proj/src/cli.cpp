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

#include "qsindy/cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "qsindy/harness.hpp"
#include "qsindy/svg_plot.hpp"

namespace qsindy::cli {

namespace {

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("invalid number '" + item + "'");
    }
  }
  return out;
}

std::vector<std::string> parse_strings(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Polynomial and quantum-feature sparse regression experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", QSINDY_VERSION);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::int64_t> seed;
  std::optional<int> trials;
  std::optional<int> jobs;
  app.add_option("--config", config_path, "TOML-style configuration file");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Base random seed")->check(CLI::NonNegativeNumber);
  app.add_option("--trials", trials, "Trials per noise level")->check(CLI::PositiveNumber);
  app.add_option("--jobs", jobs, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

  auto* sweep = app.add_subcommand("sweep", "Noise sweep over systems and methods")->fallthrough();
  std::string sweep_systems, sweep_sigmas, sweep_methods, sweep_map;
  std::optional<double> sweep_p;
  sweep->add_option("--systems", sweep_systems, "Comma-separated system names");
  sweep->add_option("--sigmas", sweep_sigmas, "Comma-separated noise levels");
  sweep->add_option("--methods", sweep_methods, "Comma-separated methods");
  sweep->add_option("--feature-map", sweep_map, "zz2, zz3, iqp, reupload or auto");
  sweep->add_option("--depolarizing-p", sweep_p, "Depolarizing strength for quantum features");

  auto* rbf = app.add_subcommand("rbf-grid", "RBF bandwidth and landmark grid")->fallthrough();
  auto* diagnose = app.add_subcommand("diagnose", "Overlap diagnostics, correlation and cross-validation")->fallthrough();
  auto* hw = app.add_subcommand("hw-noise", "TPR under depolarizing circuit noise")->fallthrough();
  auto* burgers = app.add_subcommand("burgers", "Viscous Burgers PDE identification")->fallthrough();

  auto* verify = app.add_subcommand("verify", "Machine-precision bias and projection identities")->fallthrough();
  std::string verify_pairs;
  bool corrupt = false;
  verify->add_option("--pairs", verify_pairs, "Comma-separated system:map pairs");
  verify->add_flag("--corrupt", corrupt, "Perturb one projected entry by 1e-3 (negative control)");

  auto* plot = app.add_subcommand("plot", "Render a result CSV as SVG")->fallthrough();
  std::string plot_csv_path, plot_kind;
  plot->add_option("--csv", plot_csv_path, "Result CSV")->required();
  plot->add_option("--kind", plot_kind, "sweep, rbf-grid or hw-noise")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (plot->parsed()) {
      const std::string dir =
          out_dir ? *out_dir : std::filesystem::path(plot_csv_path).parent_path().string();
      for (const auto& f : plot_csv(plot_csv_path, plot_kind, dir.empty() ? "." : dir)) out << "wrote " << f << '\n';
      return kExitOk;
    }

    const ConfigTable table = config_path.empty() ? ConfigTable{} : ConfigTable::load(config_path);
    ExperimentConfig config = ExperimentConfig::from_table(table);
    if (out_dir) config.output_dir = *out_dir;
    if (seed) config.base_seed = static_cast<std::uint64_t>(*seed);
    if (trials) config.n_trials = *trials;
    if (jobs) config.jobs = *jobs;
    if (!sweep_systems.empty()) config.systems = parse_strings(sweep_systems);
    if (!sweep_sigmas.empty()) config.noise_levels = parse_doubles(sweep_sigmas);
    if (!sweep_methods.empty()) {
      config.methods.clear();
      for (const auto& m : parse_strings(sweep_methods)) config.methods.push_back(parse_method(m));
    }
    if (!sweep_map.empty()) config.feature_map = sweep_map;
    if (sweep_p) config.depolarizing_p = *sweep_p;
    if (!verify_pairs.empty()) config.verify_pairs = parse_pairs(verify_pairs);
    config.verify_corrupt = corrupt;
    config.validate();

    if (sweep->parsed()) return cmd_sweep(config, out);
    if (rbf->parsed()) return cmd_rbf_grid(config, out);
    if (diagnose->parsed()) return cmd_diagnose(config, out);
    if (hw->parsed()) return cmd_hw_noise(config, out);
    if (burgers->parsed()) return cmd_burgers(config, out);
    if (verify->parsed()) return cmd_verify(config, out);
  } catch (const VerificationError& e) {
    err << "verification failed: " << e.what() << '\n';
    return kExitVerification;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace qsindy::cli
