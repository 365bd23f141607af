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

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qsindy/config.hpp"
#include "qsindy/diagnostics.hpp"
#include "qsindy/dynamics.hpp"
#include "qsindy/feature_maps.hpp"
#include "qsindy/libraries.hpp"
#include "qsindy/regression.hpp"

namespace qsindy {

enum class Method { Vanilla, NaiveQ, OrthQ, Rbf };

std::string_view to_string(Method method);
/// Accepts vanilla, naive_q, orth_q, rbf.
Method parse_method(std::string_view text);

using SystemMap = std::pair<std::string, std::string>;  ///< (system, feature map)

/// Parses "duffing:zz2,lotka_volterra:zz2".
std::vector<SystemMap> parse_pairs(std::string_view text);

struct ExperimentConfig {
  // Shared.
  std::uint64_t base_seed = 1000;
  int n_trials = 5;
  int jobs = 0;  ///< 0 picks the hardware concurrency
  std::string output_dir = "results";
  int smooth_window = 5;

  // sweep
  std::vector<std::string> systems{"duffing", "van_der_pol", "lorenz"};
  std::vector<Method> methods{Method::Vanilla, Method::NaiveQ, Method::OrthQ, Method::Rbf};
  std::string feature_map = "auto";  ///< "auto" picks zz2 for 2-D and zz3 for 3-D systems
  std::vector<double> noise_levels;  ///< empty selects each system's default grid
  double depolarizing_p = 0.0;
  double rbf_gamma_multiplier = 1.0;
  int rbf_landmarks = 12;

  // rbf-grid
  std::string rbf_system = "duffing";
  double rbf_sigma = 0.05;
  std::vector<double> rbf_gamma_multipliers{0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<int> rbf_landmark_counts{3, 6, 12, 24};

  // diagnose
  std::vector<SystemMap> diagnostic_combos{
      {"duffing", "zz2"},     {"duffing", "iqp"},        {"duffing", "reupload"}, {"van_der_pol", "zz2"},
      {"van_der_pol", "iqp"}, {"van_der_pol", "reupload"}, {"lorenz", "zz3"},     {"lotka_volterra", "zz2"},
      {"cubic_oscillator", "zz2"}, {"rossler", "zz3"}};
  std::map<std::string, double> reference_sigma{{"duffing", 0.02},         {"van_der_pol", 0.02},
                                                {"lorenz", 0.2},           {"lotka_volterra", 0.0},
                                                {"cubic_oscillator", 0.01}, {"rossler", 0.2}};

  // hw-noise
  std::string hw_system = "duffing";
  double hw_sigma = 0.02;
  std::vector<double> hw_p_grid{0.0, 0.005, 0.01, 0.015, 0.02};

  // burgers
  BurgersSetup burgers;
  double burgers_lambda = 0.05;

  // verify
  std::vector<SystemMap> verify_pairs = diagnostic_combos;
  double verify_tolerance = 1e-12;
  double preservation_tolerance = 1e-10;
  bool verify_corrupt = false;

  /// Defaults overridden by any keys present in `table`. Unknown keys are
  /// rejected.
  static ExperimentConfig from_table(const ConfigTable& table);
  void validate() const;
  int effective_jobs() const;
  nlohmann::json to_json() const;
};

/// {0, .01, .02, .05, .08, .10, .12}, scaled by 10 for 3-D systems.
std::vector<double> default_noise_grid(const SystemSpec& system);

/// base_seed + FNV-1a(system, sigma index, trial).
std::uint64_t cell_seed(std::uint64_t base_seed, std::string_view system, std::size_t sigma_index, int trial);

/// Resolves "auto" against the system dimension.
FeatureMapSpec resolve_feature_map(const std::string& name, const SystemSpec& system);

/// Noisy states and derivative estimates for one cell, trimmed to the rows
/// where the derivative is defined.
struct CellData {
  Matrix x;
  Matrix xdot;
  FeatureLibrary poly;
  Matrix xi_true;
  std::vector<std::string> true_labels;
};

CellData prepare_cell(const SystemSpec& system, const Trajectory& clean, double sigma, std::uint64_t seed,
                      int smooth_window);

struct MethodFit {
  SindyModel model;
  RecoveryScore score;
  double r2_q = 0.0;            ///< NaN for vanilla
  double frac_var_in_p = 0.0;   ///< NaN for vanilla
};

struct RbfSettings {
  double gamma_multiplier = 1.0;
  int landmarks = 12;
};

/// Fits one method on prepared data. `q` is the quantum block for the quantum
/// methods and is ignored otherwise.
MethodFit fit_method(Method method, const CellData& cell, double lambda, const Matrix* q,
                     const std::vector<std::string>& q_labels, const RbfSettings& rbf);

/// Runs fn(0..n-1) on `jobs` threads. The first exception is rethrown after
/// all workers stop.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

// ---------------------------------------------------------------------------

struct ExperimentRecord {
  std::string system;
  Method method = Method::Vanilla;
  std::string feature_map;
  double sigma = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  double tpr = 0.0;
  double r2_q = 0.0;
  double frac_var_in_p = 0.0;
  double wall_time_ms = 0.0;
};

std::vector<ExperimentRecord> run_sweep(const ExperimentConfig& config);
void write_sweep_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);
void write_timing_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);

struct RbfGridCell {
  double gamma_multiplier = 0.0;
  int landmarks = 0;
  std::vector<double> trial_tpr;
  double mean_tpr = 0.0;
};

struct RbfGridResult {
  std::vector<double> vanilla_trial_tpr;
  double vanilla_mean_tpr = 0.0;
  std::vector<RbfGridCell> cells;  ///< gamma-major order
};

RbfGridResult run_rbf_grid(const ExperimentConfig& config);

struct DiagnosticStudy {
  std::vector<DiagnosticRecord> records;
  PearsonResult pearson_frac;
  PearsonResult pearson_r2q;
  std::map<int, CvResult> cv_frac;  ///< keyed by k
  std::map<int, CvResult> cv_r2q;
};

DiagnosticStudy run_diagnostic_study(const ExperimentConfig& config);

struct HwNoiseRecord {
  double p = 0.0;
  Method method = Method::Vanilla;
  int trial = 0;
  std::uint64_t seed = 0;
  double tpr = 0.0;
  qsim::DensityInvariants invariants;
};

std::vector<HwNoiseRecord> run_hw_noise(const ExperimentConfig& config);

struct BurgersMethodResult {
  Method method = Method::Vanilla;
  SindyModel model;
  double tpr = 0.0;
  double coef_u_xx = 0.0;
  double coef_u_u_x = 0.0;
};

struct BurgersResult {
  std::vector<BurgersMethodResult> methods;  ///< vanilla, naive_q, orth_q
  double r2_q = 0.0;
  double frac_var_in_p = 0.0;
  Eigen::Index samples = 0;
};

BurgersResult run_burgers(const ExperimentConfig& config);

struct VerifyRecord {
  BiasReport report;
  double stlsq_deviation = 0.0;
  bool passed = false;
};

std::vector<VerifyRecord> run_verify(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Command drivers: run, write CSV/JSON under config.output_dir, print a
// summary to `log`. Return the process exit code.

int cmd_sweep(const ExperimentConfig& config, std::ostream& log);
int cmd_rbf_grid(const ExperimentConfig& config, std::ostream& log);
int cmd_diagnose(const ExperimentConfig& config, std::ostream& log);
int cmd_hw_noise(const ExperimentConfig& config, std::ostream& log);
int cmd_burgers(const ExperimentConfig& config, std::ostream& log);
int cmd_verify(const ExperimentConfig& config, std::ostream& log);

/// Writes run_meta.json next to the results.
void write_run_meta(const ExperimentConfig& config, const std::string& command);

}  // namespace qsindy
