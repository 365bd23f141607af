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

#include "qsindy/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#ifndef QSINDY_VERSION
#define QSINDY_VERSION "0.0.0"
#endif

namespace qsindy {

namespace {

constexpr std::array<double, 7> kBaseNoiseGrid{0.0, 0.01, 0.02, 0.05, 0.08, 0.10, 0.12};

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream o;
  o << std::setprecision(12) << v;
  return o.str();
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::size_t sigma_index(const SystemSpec& system, double sigma) {
  const auto grid = default_noise_grid(system);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(grid[i] - sigma) <= 1e-12 * std::max(1.0, sigma)) return i;
  }
  // Off-grid levels get an index derived from the value itself.
  return grid.size() + static_cast<std::size_t>(std::llround(sigma * 1e9));
}

std::ofstream open_output(const ExperimentConfig& config, const std::string& name) {
  std::filesystem::create_directories(config.output_dir);
  const auto path = std::filesystem::path(config.output_dir) / name;
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::vector<std::string> prefixed(const std::vector<std::string>& labels, const std::string& from,
                                  const std::string& to) {
  std::vector<std::string> out;
  for (const auto& l : labels) out.push_back(l.compare(0, from.size(), from) == 0 ? to + l.substr(from.size()) : l);
  return out;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Vanilla: return "vanilla";
    case Method::NaiveQ: return "naive_q";
    case Method::OrthQ: return "orth_q";
    case Method::Rbf: return "rbf";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  if (text == "vanilla") return Method::Vanilla;
  if (text == "naive_q" || text == "naive") return Method::NaiveQ;
  if (text == "orth_q" || text == "orth") return Method::OrthQ;
  if (text == "rbf") return Method::Rbf;
  throw ConfigError("unknown method '" + std::string(text) + "'");
}

std::vector<SystemMap> parse_pairs(std::string_view text) {
  std::vector<SystemMap> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    const std::string_view item = text.substr(start, end - start);
    start = end + 1;
    if (item.empty()) continue;
    const std::size_t colon = item.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == item.size()) {
      throw ConfigError("expected system:map, got '" + std::string(item) + "'");
    }
    out.emplace_back(std::string(item.substr(0, colon)), std::string(item.substr(colon + 1)));
  }
  if (out.empty()) throw ConfigError("empty system:map list");
  return out;
}

// ---------------------------------------------------------------------------

ExperimentConfig ExperimentConfig::from_table(const ConfigTable& t) {
  static const std::set<std::string> known{
      "run.base_seed",          "run.trials",           "run.jobs",
      "run.out",                "run.smooth_window",    "sweep.systems",
      "sweep.methods",          "sweep.feature_map",    "sweep.noise_levels",
      "sweep.depolarizing_p",   "sweep.rbf_gamma_multiplier", "sweep.rbf_landmarks",
      "rbf_grid.system",        "rbf_grid.sigma",       "rbf_grid.gamma_multipliers",
      "rbf_grid.landmark_counts", "diagnose.combos",    "hw_noise.system",
      "hw_noise.sigma",         "hw_noise.p_grid",      "burgers.lambda",
      "burgers.nu",             "burgers.n_x",          "burgers.n_t",
      "burgers.t_final",        "burgers.sample_every", "verify.pairs",
      "verify.tolerance",       "verify.preservation_tolerance"};
  for (const auto& [key, value] : t.values()) {
    if (known.count(key) == 0 && key.rfind("diagnose.reference_sigma.", 0) != 0) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }

  ExperimentConfig c;
  const auto seed = t.get_int("run.base_seed", static_cast<std::int64_t>(c.base_seed));
  if (seed < 0) throw ConfigError("run.base_seed must be non-negative");
  c.base_seed = static_cast<std::uint64_t>(seed);
  c.n_trials = static_cast<int>(t.get_int("run.trials", c.n_trials));
  c.jobs = static_cast<int>(t.get_int("run.jobs", c.jobs));
  c.output_dir = t.get_string("run.out", c.output_dir);
  c.smooth_window = static_cast<int>(t.get_int("run.smooth_window", c.smooth_window));

  c.systems = t.get_strings("sweep.systems", c.systems);
  if (t.has("sweep.methods")) {
    c.methods.clear();
    for (const auto& m : t.get_strings("sweep.methods", {})) c.methods.push_back(parse_method(m));
  }
  c.feature_map = t.get_string("sweep.feature_map", c.feature_map);
  c.noise_levels = t.get_doubles("sweep.noise_levels", c.noise_levels);
  c.depolarizing_p = t.get_double("sweep.depolarizing_p", c.depolarizing_p);
  c.rbf_gamma_multiplier = t.get_double("sweep.rbf_gamma_multiplier", c.rbf_gamma_multiplier);
  c.rbf_landmarks = static_cast<int>(t.get_int("sweep.rbf_landmarks", c.rbf_landmarks));

  c.rbf_system = t.get_string("rbf_grid.system", c.rbf_system);
  c.rbf_sigma = t.get_double("rbf_grid.sigma", c.rbf_sigma);
  c.rbf_gamma_multipliers = t.get_doubles("rbf_grid.gamma_multipliers", c.rbf_gamma_multipliers);
  if (t.has("rbf_grid.landmark_counts")) {
    c.rbf_landmark_counts.clear();
    for (double v : t.get_doubles("rbf_grid.landmark_counts", {})) {
      if (v != std::floor(v)) throw ConfigError("rbf_grid.landmark_counts must be integers");
      c.rbf_landmark_counts.push_back(static_cast<int>(v));
    }
  }

  if (t.has("diagnose.combos")) {
    c.diagnostic_combos.clear();
    for (const auto& s : t.get_strings("diagnose.combos", {})) {
      const auto pairs = parse_pairs(s);
      c.diagnostic_combos.insert(c.diagnostic_combos.end(), pairs.begin(), pairs.end());
    }
  }
  for (const auto& sys : t.keys_under("diagnose.reference_sigma")) {
    c.reference_sigma[sys] = t.get_double("diagnose.reference_sigma." + sys, 0.0);
  }

  c.hw_system = t.get_string("hw_noise.system", c.hw_system);
  c.hw_sigma = t.get_double("hw_noise.sigma", c.hw_sigma);
  c.hw_p_grid = t.get_doubles("hw_noise.p_grid", c.hw_p_grid);

  c.burgers_lambda = t.get_double("burgers.lambda", c.burgers_lambda);
  c.burgers.nu = t.get_double("burgers.nu", c.burgers.nu);
  c.burgers.n_x = static_cast<int>(t.get_int("burgers.n_x", c.burgers.n_x));
  c.burgers.n_t = static_cast<int>(t.get_int("burgers.n_t", c.burgers.n_t));
  c.burgers.t_final = t.get_double("burgers.t_final", c.burgers.t_final);
  c.burgers.sample_every = static_cast<int>(t.get_int("burgers.sample_every", c.burgers.sample_every));

  if (t.has("verify.pairs")) {
    c.verify_pairs.clear();
    for (const auto& s : t.get_strings("verify.pairs", {})) {
      const auto pairs = parse_pairs(s);
      c.verify_pairs.insert(c.verify_pairs.end(), pairs.begin(), pairs.end());
    }
  } else {
    c.verify_pairs = c.diagnostic_combos;
  }
  c.verify_tolerance = t.get_double("verify.tolerance", c.verify_tolerance);
  c.preservation_tolerance = t.get_double("verify.preservation_tolerance", c.preservation_tolerance);
  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  if (n_trials < 1) throw ConfigError("trials must be at least 1");
  if (jobs < 0) throw ConfigError("jobs must be non-negative");
  if (smooth_window < 1 || smooth_window % 2 == 0) throw ConfigError("smooth_window must be a positive odd integer");
  if (output_dir.empty()) throw ConfigError("output directory must not be empty");
  if (methods.empty()) throw ConfigError("at least one method is required");
  for (std::size_t i = 0; i < noise_levels.size(); ++i) {
    if (noise_levels[i] < 0.0) throw ConfigError("noise levels must be non-negative");
    if (i > 0 && noise_levels[i] < noise_levels[i - 1]) throw ConfigError("noise levels must be sorted");
  }
  for (const auto& s : systems) {
    try {
      (void)system_by_name(s);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (feature_map != "auto") {
    try {
      (void)parse_feature_map(feature_map);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (depolarizing_p < 0.0 || depolarizing_p > 1.0) throw ConfigError("depolarizing_p must lie in [0, 1]");
  if (!(rbf_gamma_multiplier > 0.0) || rbf_landmarks < 1) throw ConfigError("invalid rbf settings");
  if (rbf_gamma_multipliers.empty() || rbf_landmark_counts.empty()) throw ConfigError("rbf grid must not be empty");
  for (double p : hw_p_grid) {
    if (p < 0.0 || p > 1.0) throw ConfigError("hw_noise.p_grid entries must lie in [0, 1]");
  }
  if (!(burgers_lambda > 0.0)) throw ConfigError("burgers.lambda must be positive");
  if (verify_pairs.empty()) throw ConfigError("verify needs at least one system:map pair");
}

int ExperimentConfig::effective_jobs() const {
  if (jobs > 0) return jobs;
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

nlohmann::json ExperimentConfig::to_json() const {
  auto pairs_json = [](const std::vector<SystemMap>& v) {
    auto a = nlohmann::json::array();
    for (const auto& [s, m] : v) a.push_back(s + ":" + m);
    return a;
  };
  std::vector<std::string> method_names;
  for (Method m : methods) method_names.emplace_back(to_string(m));
  return {
      {"base_seed", base_seed},
      {"trials", n_trials},
      {"jobs", jobs},
      {"out", output_dir},
      {"smooth_window", smooth_window},
      {"sweep",
       {{"systems", systems},
        {"methods", method_names},
        {"feature_map", feature_map},
        {"noise_levels", noise_levels},
        {"depolarizing_p", depolarizing_p},
        {"rbf_gamma_multiplier", rbf_gamma_multiplier},
        {"rbf_landmarks", rbf_landmarks}}},
      {"rbf_grid",
       {{"system", rbf_system},
        {"sigma", rbf_sigma},
        {"gamma_multipliers", rbf_gamma_multipliers},
        {"landmark_counts", rbf_landmark_counts}}},
      {"diagnose", {{"combos", pairs_json(diagnostic_combos)}, {"reference_sigma", reference_sigma}}},
      {"hw_noise", {{"system", hw_system}, {"sigma", hw_sigma}, {"p_grid", hw_p_grid}}},
      {"burgers",
       {{"lambda", burgers_lambda},
        {"nu", burgers.nu},
        {"n_x", burgers.n_x},
        {"n_t", burgers.n_t},
        {"t_final", burgers.t_final},
        {"sample_every", burgers.sample_every}}},
      {"verify",
       {{"pairs", pairs_json(verify_pairs)},
        {"tolerance", verify_tolerance},
        {"preservation_tolerance", preservation_tolerance},
        {"corrupt", verify_corrupt}}},
  };
}

// ---------------------------------------------------------------------------

std::vector<double> default_noise_grid(const SystemSpec& system) {
  const double scale = system.dimension == 3 ? 10.0 : 1.0;
  std::vector<double> out;
  for (double s : kBaseNoiseGrid) out.push_back(s * scale);
  return out;
}

std::uint64_t cell_seed(std::uint64_t base_seed, std::string_view system, std::size_t sigma_index, int trial) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](std::string_view bytes) {
    for (unsigned char ch : bytes) {
      h ^= ch;
      h *= 1099511628211ull;
    }
  };
  mix(system);
  mix("|");
  mix(std::to_string(sigma_index));
  mix("|");
  mix(std::to_string(trial));
  return base_seed + h;
}

FeatureMapSpec resolve_feature_map(const std::string& name, const SystemSpec& system) {
  if (name == "auto") return FeatureMapSpec::make(system.dimension == 3 ? FeatureMapKind::ZZ3 : FeatureMapKind::ZZ2);
  const FeatureMapSpec spec = FeatureMapSpec::make(parse_feature_map(name));
  if (spec.input_arity() != system.dimension) {
    throw ArityError(std::string(to_string(spec.kind)) + " cannot encode the " + std::to_string(system.dimension) +
                     "-dimensional system " + system.name);
  }
  return spec;
}

CellData prepare_cell(const SystemSpec& system, const Trajectory& clean, double sigma, std::uint64_t seed,
                      int smooth_window) {
  const Trajectory noisy = add_noise(clean, sigma, seed);
  DerivativeEstimate est = estimate_derivative(noisy, smooth_window);
  CellData c;
  c.x = noisy.states.middleRows(est.valid_rows.begin, est.valid_rows.size());
  c.xdot = std::move(est.xdot);
  c.poly = polynomial_features(c.x, system.poly_degree);
  c.true_labels = c.poly.labels;
  c.xi_true = assemble_true_xi(system, c.true_labels);
  return c;
}

MethodFit fit_method(Method method, const CellData& cell, double lambda, const Matrix* q,
                     const std::vector<std::string>& q_labels, const RbfSettings& rbf) {
  const Matrix& p = cell.poly.matrix;
  Matrix block;
  std::vector<std::string> labels = cell.poly.labels;
  std::vector<std::string> block_labels;
  switch (method) {
    case Method::Vanilla:
      break;
    case Method::NaiveQ:
    case Method::OrthQ:
      if (q == nullptr) throw std::logic_error("quantum method without quantum features");
      if (method == Method::NaiveQ) {
        block = *q;
        block_labels = q_labels;
      } else {
        block = orthogonalize(*q, p).q_perp;
        block_labels = prefixed(q_labels, "q:", "qperp:");
      }
      break;
    case Method::Rbf: {
      const double gamma = rbf.gamma_multiplier * median_bandwidth(cell.x);
      const auto lib = rbf_features(cell.x, select_landmarks(cell.x, rbf.landmarks), gamma);
      block = lib.matrix;
      block_labels = lib.labels;
      break;
    }
  }
  labels.insert(labels.end(), block_labels.begin(), block_labels.end());

  MethodFit fit;
  fit.model = stlsq(block.cols() > 0 ? hstack(p, block) : p, cell.xdot, lambda, 20, std::move(labels));
  fit.score = tpr(fit.model, cell.xi_true, cell.true_labels);
  if (block.cols() > 0) {
    fit.r2_q = r2_q(block, cell.xdot);
    fit.frac_var_in_p = block.squaredNorm() > 0.0 ? frac_variance_in_p(p, block) : 0.0;
  } else {
    fit.r2_q = std::nan("");
    fit.frac_var_in_p = std::nan("");
  }
  return fit;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (!failed.load()) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first) first = std::current_exception();
          failed.store(true);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

namespace {

// Re-raises a module error with the failing cell named.
[[noreturn]] void rethrow_annotated(const std::string& cell) {
  try {
    throw;
  } catch (const std::exception& e) {
    throw Error(cell + ": " + e.what());
  }
}

std::vector<double> levels_for(const ExperimentConfig& config, const SystemSpec& system) {
  return config.noise_levels.empty() ? default_noise_grid(system) : config.noise_levels;
}

}  // namespace

std::vector<ExperimentRecord> run_sweep(const ExperimentConfig& config) {
  config.validate();
  struct Unit {
    std::size_t system;
    std::size_t sigma_idx;
    int trial;
  };
  std::vector<SystemSpec> specs;
  std::vector<Trajectory> clean;
  std::vector<std::vector<double>> levels;
  for (const auto& name : config.systems) {
    specs.push_back(system_by_name(name));
    clean.push_back(integrate(specs.back(), specs.back().default_dt, specs.back().default_steps()));
    levels.push_back(levels_for(config, specs.back()));
  }
  std::vector<Unit> units;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    for (std::size_t k = 0; k < levels[s].size(); ++k) {
      for (int t = 0; t < config.n_trials; ++t) units.push_back({s, k, t});
    }
  }

  const bool needs_q = std::any_of(config.methods.begin(), config.methods.end(),
                                   [](Method m) { return m == Method::NaiveQ || m == Method::OrthQ; });
  const RbfSettings rbf{config.rbf_gamma_multiplier, config.rbf_landmarks};
  std::vector<std::vector<ExperimentRecord>> out(units.size());

  parallel_for(units.size(), config.effective_jobs(), [&](std::size_t u) {
    const Unit& unit = units[u];
    const SystemSpec& spec = specs[unit.system];
    const double sigma = levels[unit.system][unit.sigma_idx];
    const std::string where = spec.name + " sigma=" + num(sigma) + " trial=" + std::to_string(unit.trial);
    try {
      const FeatureMapSpec fmap = resolve_feature_map(config.feature_map, spec);
      const std::size_t sidx = config.noise_levels.empty() ? unit.sigma_idx : sigma_index(spec, sigma);
      const std::uint64_t seed = cell_seed(config.base_seed, spec.name, sidx, unit.trial);
      const CellData cell = prepare_cell(spec, clean[unit.system], sigma, seed, config.smooth_window);
      QuantumFeatures qf;
      double q_ms = 0.0;
      if (needs_q) {
        const auto start = std::chrono::steady_clock::now();
        qf = evaluate(fmap, cell.x, config.depolarizing_p);
        q_ms = elapsed_ms(start);
      }
      for (Method m : config.methods) {
        const auto start = std::chrono::steady_clock::now();
        const MethodFit fit = fit_method(m, cell, spec.stlsq_threshold, needs_q ? &qf.q : nullptr,
                                         qf.column_labels, rbf);
        ExperimentRecord r;
        r.system = spec.name;
        r.method = m;
        r.feature_map = m == Method::Vanilla || m == Method::Rbf ? "none" : std::string(to_string(fmap.kind));
        r.sigma = sigma;
        r.trial = unit.trial;
        r.seed = seed;
        r.tpr = fit.score.tpr;
        r.r2_q = fit.r2_q;
        r.frac_var_in_p = fit.frac_var_in_p;
        r.wall_time_ms = elapsed_ms(start) + (m == Method::NaiveQ || m == Method::OrthQ ? q_ms : 0.0);
        out[u].push_back(std::move(r));
      }
    } catch (...) {
      rethrow_annotated(where);
    }
  });

  std::vector<ExperimentRecord> flat;
  for (auto& v : out) {
    for (auto& r : v) flat.push_back(std::move(r));
  }
  return flat;
}

void write_sweep_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  out << "system,method,feature_map,sigma,trial,seed,tpr,r2_q,frac_var_in_p\n";
  for (const auto& r : records) {
    out << r.system << ',' << to_string(r.method) << ',' << r.feature_map << ',' << num(r.sigma) << ',' << r.trial
        << ',' << r.seed << ',' << num(r.tpr) << ',' << num(r.r2_q) << ',' << num(r.frac_var_in_p) << '\n';
  }
}

void write_timing_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  out << "system,method,sigma,trial,wall_time_ms\n";
  for (const auto& r : records) {
    out << r.system << ',' << to_string(r.method) << ',' << num(r.sigma) << ',' << r.trial << ','
        << num(r.wall_time_ms) << '\n';
  }
}

RbfGridResult run_rbf_grid(const ExperimentConfig& config) {
  config.validate();
  const SystemSpec spec = system_by_name(config.rbf_system);
  const Trajectory clean = integrate(spec, spec.default_dt, spec.default_steps());
  const std::size_t sidx = sigma_index(spec, config.rbf_sigma);
  const std::size_t n_g = config.rbf_gamma_multipliers.size();
  const std::size_t n_l = config.rbf_landmark_counts.size();
  const auto trials = static_cast<std::size_t>(config.n_trials);

  RbfGridResult res;
  res.vanilla_trial_tpr.assign(trials, 0.0);
  res.cells.resize(n_g * n_l);
  for (std::size_t g = 0; g < n_g; ++g) {
    for (std::size_t l = 0; l < n_l; ++l) {
      auto& c = res.cells[g * n_l + l];
      c.gamma_multiplier = config.rbf_gamma_multipliers[g];
      c.landmarks = config.rbf_landmark_counts[l];
      c.trial_tpr.assign(trials, 0.0);
    }
  }
  // One job per (trial, grid cell), plus one vanilla job per trial.
  std::vector<CellData> cells(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    cells[t] = prepare_cell(spec, clean, config.rbf_sigma,
                            cell_seed(config.base_seed, spec.name, sidx, static_cast<int>(t)), config.smooth_window);
  }
  const std::size_t per_trial = n_g * n_l + 1;
  parallel_for(trials * per_trial, config.effective_jobs(), [&](std::size_t job) {
    const std::size_t t = job / per_trial;
    const std::size_t k = job % per_trial;
    try {
      if (k == 0) {
        res.vanilla_trial_tpr[t] = fit_method(Method::Vanilla, cells[t], spec.stlsq_threshold, nullptr, {}, {}).score.tpr;
        return;
      }
      auto& c = res.cells[k - 1];
      const RbfSettings rbf{c.gamma_multiplier, c.landmarks};
      c.trial_tpr[t] = fit_method(Method::Rbf, cells[t], spec.stlsq_threshold, nullptr, {}, rbf).score.tpr;
    } catch (...) {
      rethrow_annotated("rbf-grid trial " + std::to_string(t) + " cell " + std::to_string(k));
    }
  });
  res.vanilla_mean_tpr = mean(res.vanilla_trial_tpr);
  for (auto& c : res.cells) c.mean_tpr = mean(c.trial_tpr);
  return res;
}

DiagnosticStudy run_diagnostic_study(const ExperimentConfig& config) {
  config.validate();
  DiagnosticStudy study;
  study.records.resize(config.diagnostic_combos.size());
  parallel_for(config.diagnostic_combos.size(), config.effective_jobs(), [&](std::size_t i) {
    const auto& [sys_name, map_name] = config.diagnostic_combos[i];
    try {
      const SystemSpec spec = system_by_name(sys_name);
      const FeatureMapSpec fmap = resolve_feature_map(map_name, spec);
      const auto ref = config.reference_sigma.find(spec.name);
      if (ref == config.reference_sigma.end()) throw ConfigError("no reference sigma for " + spec.name);
      const Trajectory clean = integrate(spec, spec.default_dt, spec.default_steps());

      // Overlap diagnostics on the noise-free trajectory.
      const CellData base = prepare_cell(spec, clean, 0.0, 0, config.smooth_window);
      const Matrix q = evaluate(fmap, base.x).q;
      DiagnosticRecord rec;
      rec.system = spec.name;
      rec.feature_map = std::string(to_string(fmap.kind));
      rec.frac_var_in_p = frac_variance_in_p(base.poly.matrix, q);
      rec.r2_q = r2_q(q, base.xdot);

      // Severity at the reference noise level.
      const std::size_t sidx = sigma_index(spec, ref->second);
      std::vector<double> van, naive;
      for (int t = 0; t < config.n_trials; ++t) {
        const CellData cell = prepare_cell(spec, clean, ref->second, cell_seed(config.base_seed, spec.name, sidx, t),
                                           config.smooth_window);
        const QuantumFeatures qf = evaluate(fmap, cell.x);
        van.push_back(fit_method(Method::Vanilla, cell, spec.stlsq_threshold, nullptr, {}, {}).score.tpr);
        naive.push_back(
            fit_method(Method::NaiveQ, cell, spec.stlsq_threshold, &qf.q, qf.column_labels, {}).score.tpr);
      }
      rec.severity = severity(mean(van), mean(naive));
      study.records[i] = rec;
    } catch (...) {
      rethrow_annotated("diagnose " + sys_name + ":" + map_name);
    }
  });

  std::vector<double> frac, r2, sev;
  for (const auto& r : study.records) {
    frac.push_back(r.frac_var_in_p);
    r2.push_back(r.r2_q);
    sev.push_back(r.severity);
  }
  study.pearson_frac = pearson(frac, sev);
  study.pearson_r2q = pearson(r2, sev);
  for (int k = 1; k <= 3; ++k) {
    if (static_cast<int>(sev.size()) - k < 2) break;
    study.cv_frac[k] = leave_k_out_mae(frac, sev, k);
    study.cv_r2q[k] = leave_k_out_mae(r2, sev, k);
  }
  return study;
}

std::vector<HwNoiseRecord> run_hw_noise(const ExperimentConfig& config) {
  config.validate();
  const SystemSpec spec = system_by_name(config.hw_system);
  const FeatureMapSpec fmap = resolve_feature_map(config.feature_map, spec);
  const Trajectory clean = integrate(spec, spec.default_dt, spec.default_steps());
  const std::size_t sidx = sigma_index(spec, config.hw_sigma);
  const std::array<Method, 3> methods{Method::Vanilla, Method::NaiveQ, Method::OrthQ};
  const auto trials = static_cast<std::size_t>(config.n_trials);
  const std::size_t n_p = config.hw_p_grid.size();

  std::vector<CellData> cells(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    cells[t] = prepare_cell(spec, clean, config.hw_sigma,
                            cell_seed(config.base_seed, spec.name, sidx, static_cast<int>(t)), config.smooth_window);
  }
  // Slot layout: [p][method][trial].
  std::vector<HwNoiseRecord> out(n_p * methods.size() * trials);
  parallel_for(n_p * trials, config.effective_jobs(), [&](std::size_t job) {
    const std::size_t pi = job / trials;
    const std::size_t t = job % trials;
    const double p = config.hw_p_grid[pi];
    try {
      const QuantumFeatures qf = evaluate(fmap, cells[t].x, p);
      for (std::size_t m = 0; m < methods.size(); ++m) {
        HwNoiseRecord r;
        r.p = p;
        r.method = methods[m];
        r.trial = static_cast<int>(t);
        r.seed = cell_seed(config.base_seed, spec.name, sidx, static_cast<int>(t));
        r.tpr = fit_method(methods[m], cells[t], spec.stlsq_threshold, &qf.q, qf.column_labels, {}).score.tpr;
        r.invariants = qf.worst_invariants;
        out[(pi * methods.size() + m) * trials + t] = r;
      }
    } catch (...) {
      rethrow_annotated("hw-noise p=" + num(p) + " trial=" + std::to_string(t));
    }
  });
  return out;
}

BurgersResult run_burgers(const ExperimentConfig& config) {
  config.validate();
  const PdeField field = solve_burgers(config.burgers);
  const PdeRegressionData data = burgers_regression_data(field);
  const std::vector<std::string> names{"u", "u_x", "u_xx"};

  CellData cell;
  cell.x = data.features;
  cell.xdot = data.u_t;
  cell.poly = polynomial_features(data.features, 2, names);
  cell.true_labels = cell.poly.labels;
  cell.xi_true = Matrix::Zero(cell.poly.cols(), 1);
  const auto index_of = [&](const std::string& label) {
    const auto it = std::find(cell.true_labels.begin(), cell.true_labels.end(), label);
    if (it == cell.true_labels.end()) throw MissingLabelError("burgers library has no column '" + label + "'");
    return static_cast<Eigen::Index>(it - cell.true_labels.begin());
  };
  const Eigen::Index i_uxx = index_of("u_xx");
  const Eigen::Index i_uux = index_of("u*u_x");
  cell.xi_true(i_uxx, 0) = field.nu;
  cell.xi_true(i_uux, 0) = -1.0;

  const FeatureMapSpec fmap = FeatureMapSpec::make(FeatureMapKind::ZZ3);
  const QuantumFeatures qf = evaluate(fmap, data.features);

  BurgersResult res;
  res.samples = data.features.rows();
  res.r2_q = r2_q(qf.q, data.u_t);
  res.frac_var_in_p = frac_variance_in_p(cell.poly.matrix, qf.q);
  for (Method m : {Method::Vanilla, Method::NaiveQ, Method::OrthQ}) {
    MethodFit fit = fit_method(m, cell, config.burgers_lambda, &qf.q, qf.column_labels, {});
    BurgersMethodResult r;
    r.method = m;
    r.tpr = fit.score.tpr;
    r.coef_u_xx = fit.model.xi(i_uxx, 0);
    r.coef_u_u_x = fit.model.xi(i_uux, 0);
    r.model = std::move(fit.model);
    res.methods.push_back(std::move(r));
  }
  return res;
}

std::vector<VerifyRecord> run_verify(const ExperimentConfig& config) {
  config.validate();
  std::vector<VerifyRecord> out(config.verify_pairs.size());
  parallel_for(out.size(), config.effective_jobs(), [&](std::size_t i) {
    const auto& [sys_name, map_name] = config.verify_pairs[i];
    try {
      const SystemSpec spec = system_by_name(sys_name);
      const FeatureMapSpec fmap = resolve_feature_map(map_name, spec);
      TheoremData d = theorem_data(spec, fmap, config.smooth_window);
      if (config.verify_corrupt) d.q_perp(0, 0) += 1e-3;
      VerifyRecord r;
      r.report = bias_report(d.p, d.q, d.q_perp, d.xdot);
      r.report.system = spec.name;
      r.report.feature_map = std::string(to_string(fmap.kind));
      r.stlsq_deviation = verify_stlsq_preservation(hstack(d.p, d.q_perp), d.p.cols(), d.xdot, spec.stlsq_threshold);
      r.passed = r.report.within(config.verify_tolerance) && r.stlsq_deviation < config.preservation_tolerance;
      out[i] = std::move(r);
    } catch (...) {
      rethrow_annotated("verify " + sys_name + ":" + map_name);
    }
  });
  return out;
}

// ---------------------------------------------------------------------------

void write_run_meta(const ExperimentConfig& config, const std::string& command) {
  nlohmann::json meta;
  meta["command"] = command;
  meta["seed"] = config.base_seed;
  meta["config"] = config.to_json();
  meta["versions"] = {{"qsindy", QSINDY_VERSION},
                      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                    std::to_string(EIGEN_MINOR_VERSION)},
                      {"compiler", __VERSION__},
                      {"cxx_standard", __cplusplus}};
  auto out = open_output(config, "run_meta.json");
  out << meta.dump(2) << '\n';
}

int cmd_sweep(const ExperimentConfig& config, std::ostream& log) {
  const auto records = run_sweep(config);
  {
    auto out = open_output(config, "sweep.csv");
    write_sweep_csv(out, records);
  }
  {
    auto out = open_output(config, "sweep_timing.csv");
    write_timing_csv(out, records);
  }
  // Mean TPR per (system, method, sigma), in record order.
  std::vector<std::string> keys;
  std::map<std::string, std::vector<double>> groups;
  for (const auto& r : records) {
    const std::string key = r.system + "," + std::string(to_string(r.method)) + "," + num(r.sigma);
    if (groups.count(key) == 0) keys.push_back(key);
    groups[key].push_back(r.tpr);
  }
  auto summary = open_output(config, "sweep_summary.csv");
  summary << "system,method,sigma,mean_tpr,min_tpr,max_tpr\n";
  log << "system,method,sigma,mean_tpr\n";
  for (const auto& k : keys) {
    const auto& v = groups[k];
    summary << k << ',' << num(mean(v)) << ',' << num(*std::min_element(v.begin(), v.end())) << ','
            << num(*std::max_element(v.begin(), v.end())) << '\n';
    log << k << ',' << num(mean(v)) << '\n';
  }
  write_run_meta(config, "sweep");
  return 0;
}

int cmd_rbf_grid(const ExperimentConfig& config, std::ostream& log) {
  const auto res = run_rbf_grid(config);
  auto out = open_output(config, "rbf_grid.csv");
  out << "gamma_multiplier,landmarks,mean_tpr,vanilla_mean_tpr\n";
  for (const auto& c : res.cells) {
    out << num(c.gamma_multiplier) << ',' << c.landmarks << ',' << num(c.mean_tpr) << ',' << num(res.vanilla_mean_tpr)
        << '\n';
  }
  log << "vanilla mean TPR " << num(res.vanilla_mean_tpr) << '\n';
  for (const auto& c : res.cells) {
    log << "gamma x" << num(c.gamma_multiplier) << " L=" << c.landmarks << " mean TPR " << num(c.mean_tpr) << '\n';
  }
  write_run_meta(config, "rbf-grid");
  return 0;
}

int cmd_diagnose(const ExperimentConfig& config, std::ostream& log) {
  const auto study = run_diagnostic_study(config);
  {
    auto out = open_output(config, "diagnostics.csv");
    out << "system,feature_map,frac_var_in_p,r2_q,severity\n";
    for (const auto& r : study.records) {
      out << r.system << ',' << r.feature_map << ',' << num(r.frac_var_in_p) << ',' << num(r.r2_q) << ','
          << num(r.severity) << '\n';
    }
  }
  {
    auto out = open_output(config, "correlations.csv");
    out << "diagnostic,pearson_r,p_value\n";
    out << "frac_var_in_p," << num(study.pearson_frac.r) << ',' << num(study.pearson_frac.p_value) << '\n';
    out << "r2_q," << num(study.pearson_r2q.r) << ',' << num(study.pearson_r2q.p_value) << '\n';
  }
  {
    auto out = open_output(config, "cross_validation.csv");
    out << "k,splits,mae_frac_var_in_p,mae_r2_q\n";
    for (const auto& [k, cv] : study.cv_frac) {
      out << k << ',' << cv.splits << ',' << num(cv.mae) << ',' << num(study.cv_r2q.at(k).mae) << '\n';
    }
  }
  log << "system,feature_map,frac_var_in_p,r2_q,severity\n";
  for (const auto& r : study.records) {
    log << r.system << ',' << r.feature_map << ',' << num(r.frac_var_in_p) << ',' << num(r.r2_q) << ','
        << num(r.severity) << '\n';
  }
  log << "pearson frac_var_in_p r=" << num(study.pearson_frac.r) << " p=" << num(study.pearson_frac.p_value) << '\n';
  log << "pearson r2_q r=" << num(study.pearson_r2q.r) << " p=" << num(study.pearson_r2q.p_value) << '\n';
  for (const auto& [k, cv] : study.cv_frac) {
    log << "k=" << k << " splits=" << cv.splits << " MAE frac=" << num(cv.mae) << " r2_q=" << num(study.cv_r2q.at(k).mae)
        << '\n';
  }
  write_run_meta(config, "diagnose");
  return 0;
}

int cmd_hw_noise(const ExperimentConfig& config, std::ostream& log) {
  const auto records = run_hw_noise(config);
  auto out = open_output(config, "hw_noise.csv");
  out << "p,method,trial,seed,tpr,trace_error,hermitian_error,min_eigenvalue\n";
  for (const auto& r : records) {
    out << num(r.p) << ',' << to_string(r.method) << ',' << r.trial << ',' << r.seed << ',' << num(r.tpr) << ','
        << num(r.invariants.trace_error) << ',' << num(r.invariants.hermitian_error) << ','
        << num(r.invariants.min_eigenvalue) << '\n';
  }
  std::map<std::pair<double, int>, std::vector<double>> groups;
  for (const auto& r : records) groups[{r.p, static_cast<int>(r.method)}].push_back(r.tpr);
  log << "p,method,mean_tpr\n";
  for (const auto& [key, v] : groups) {
    log << num(key.first) << ',' << to_string(static_cast<Method>(key.second)) << ',' << num(mean(v)) << '\n';
  }
  write_run_meta(config, "hw-noise");
  return 0;
}

int cmd_burgers(const ExperimentConfig& config, std::ostream& log) {
  const auto res = run_burgers(config);
  {
    auto out = open_output(config, "burgers.csv");
    out << "method,coef_u_xx,coef_u_u_x,tpr,r2_q,frac_var_in_p\n";
    for (const auto& m : res.methods) {
      out << to_string(m.method) << ',' << num(m.coef_u_xx) << ',' << num(m.coef_u_u_x) << ',' << num(m.tpr) << ','
          << num(res.r2_q) << ',' << num(res.frac_var_in_p) << '\n';
    }
  }
  {
    nlohmann::json j;
    for (const auto& m : res.methods) j[std::string(to_string(m.method))] = m.model.to_json();
    auto out = open_output(config, "burgers_models.json");
    out << j.dump(2) << '\n';
  }
  log << "samples " << res.samples << ", R2_Q " << num(res.r2_q) << ", frac_var_in_p " << num(res.frac_var_in_p) << '\n';
  for (const auto& m : res.methods) {
    log << to_string(m.method) << ": u_t = " << num(m.coef_u_xx) << " u_xx + " << num(m.coef_u_u_x)
        << " u*u_x, TPR " << num(m.tpr) << '\n';
  }
  write_run_meta(config, "burgers");
  return 0;
}

int cmd_verify(const ExperimentConfig& config, std::ostream& log) {
  const auto records = run_verify(config);
  bool ok = true;
  nlohmann::json reports = nlohmann::json::array();
  auto out = open_output(config, "verify.csv");
  out << "system,feature_map,max_relative_error,orth_deviation,stlsq_deviation,passed\n";
  for (const auto& r : records) {
    ok = ok && r.passed;
    out << r.report.system << ',' << r.report.feature_map << ',' << num(r.report.max_relative_error) << ','
        << num(r.report.orth_deviation) << ',' << num(r.stlsq_deviation) << ',' << (r.passed ? "true" : "false")
        << '\n';
    auto j = r.report.to_json();
    j["stlsq_deviation"] = r.stlsq_deviation;
    j["passed"] = r.passed;
    reports.push_back(std::move(j));
    log << (r.passed ? "PASS " : "FAIL ") << r.report.system << '+' << r.report.feature_map
        << " relative_error=" << num(r.report.max_relative_error) << " orth_deviation=" << num(r.report.orth_deviation)
        << " stlsq_deviation=" << num(r.stlsq_deviation) << '\n';
  }
  auto js = open_output(config, "verify.json");
  js << reports.dump(2) << '\n';
  write_run_meta(config, "verify");
  return ok ? 0 : 2;
}

}  // namespace qsindy
