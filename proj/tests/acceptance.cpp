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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include "oracles/dense_circuit.hpp"
#include "oracles/stats_oracles.hpp"
#include "qsindy/harness.hpp"

using namespace qsindy;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = n(rng);
  return m;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qsindy_acceptance_" + name);
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

double mean_tpr(const std::vector<ExperimentRecord>& records, Method m) {
  double sum = 0.0;
  int n = 0;
  for (const auto& r : records) {
    if (r.method != m) continue;
    sum += r.tpr;
    ++n;
  }
  return n ? sum / n : 0.0;
}

// True when method `m` has the same TPR as vanilla in every (sigma, trial).
bool matches_vanilla(const std::vector<ExperimentRecord>& records, Method m) {
  for (const auto& v : records) {
    if (v.method != Method::Vanilla) continue;
    bool found = false;
    for (const auto& o : records) {
      if (o.method == m && o.sigma == v.sigma && o.trial == v.trial && o.system == v.system) {
        found = true;
        if (o.tpr != v.tpr) return false;
      }
    }
    if (!found) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

Outcome ac1(double& seconds_limit) {
  seconds_limit = 10.0;
  double worst_rel = 0.0, worst_orth = 0.0;
  for (const auto& sys : {duffing(), lotka_volterra()}) {
    const auto d = theorem_data(sys, FeatureMapSpec::make(FeatureMapKind::ZZ2));
    const auto r = bias_report(d.p, d.q, d.q_perp, d.xdot);
    worst_rel = std::max(worst_rel, r.max_relative_error);
    worst_orth = std::max(worst_orth, r.orth_deviation);
  }
  return {worst_rel < 1e-12 && worst_orth < 1e-12,
          fmt("max relative error %.2e, orth deviation %.2e (tol 1e-12)", worst_rel, worst_orth)};
}

Outcome ac2(double& seconds_limit) {
  seconds_limit = 30.0;
  double worst = 0.0;
  for (const auto& sys : benchmark_systems()) {
    const auto d = theorem_data(sys, resolve_feature_map("auto", sys));
    worst = std::max(worst, verify_stlsq_preservation(hstack(d.p, d.q_perp), d.p.cols(), d.xdot, sys.stlsq_threshold));
  }
  return {worst < 1e-10, fmt("max polynomial coefficient deviation over 6 systems %.2e (tol 1e-10)", worst)};
}

Outcome ac3(double&) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> kind(0, 5), size(1, 12);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  double worst = 0.0, worst_noisy = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 2;
    std::uniform_int_distribution<int> qubit(0, n - 1);
    qsim::Circuit c(n);
    const int gates = size(rng);
    for (int g = 0; g < gates; ++g) {
      const int a = qubit(rng);
      int b = qubit(rng);
      while (b == a) b = qubit(rng);
      switch (kind(rng)) {
        case 0: c.add(qsim::Gate::h(a)); break;
        case 1: c.add(qsim::Gate::rx(a, angle(rng))); break;
        case 2: c.add(qsim::Gate::ry(a, angle(rng))); break;
        case 3: c.add(qsim::Gate::rz(a, angle(rng))); break;
        case 4: c.add(qsim::Gate::rzz(a, b, angle(rng))); break;
        default: c.add(qsim::Gate::cnot(a, b)); break;
      }
    }
    const auto pure = qsim::run_pure(c);
    const auto noisy = qsim::run_noisy(c, 0.0);
    for (int code = 0; code < (1 << (2 * n)); ++code) {
      std::string text;
      for (int q = 0; q < n; ++q) text.push_back("IXYZ"[(code >> (2 * q)) & 3]);
      const auto obs = qsim::PauliString::parse(text);
      const double e = qsim::expectation(pure, obs);
      worst = std::max(worst, std::abs(e - oracle::expectation(c, text)));
      worst_noisy = std::max(worst_noisy, std::abs(qsim::expectation(noisy, obs) - e));
    }
  }
  return {worst < 1e-12 && worst_noisy < 1e-12,
          fmt("100 circuits: oracle deviation %.2e, noisy(p=0) vs pure %.2e (tol 1e-12)", worst, worst_noisy)};
}

Outcome ac4(double&) {
  ExperimentConfig c;
  c.systems = {"duffing"};
  c.noise_levels = {0.02};
  c.methods = {Method::Vanilla, Method::NaiveQ, Method::OrthQ};
  const auto rec = run_sweep(c);
  const double v = mean_tpr(rec, Method::Vanilla), nq = mean_tpr(rec, Method::NaiveQ);
  const bool same = matches_vanilla(rec, Method::OrthQ);
  return {v >= 0.9 && nq <= 0.6 && same,
          fmt("vanilla %.3f (>= 0.9), naive_q %.3f (<= 0.6), orth_q == vanilla per trial: %s", v, nq,
              same ? "yes" : "no")};
}

Outcome ac5(double&) {
  ExperimentConfig c;
  c.systems = {"lotka_volterra"};
  c.noise_levels = {0.0};
  c.methods = {Method::Vanilla, Method::NaiveQ, Method::OrthQ};
  const auto rec = run_sweep(c);
  bool exact = true;
  for (const auto& r : rec) {
    if (r.method != Method::NaiveQ && r.tpr != 1.0) exact = false;
  }
  const double nq = mean_tpr(rec, Method::NaiveQ);
  return {nq <= 0.2 && exact,
          fmt("naive_q %.3f (<= 0.2), vanilla %.3f, orth_q %.3f (both == 1.0 per trial: %s)", nq,
              mean_tpr(rec, Method::Vanilla), mean_tpr(rec, Method::OrthQ), exact ? "yes" : "no")};
}

Outcome ac6(double&) {
  const auto grid = run_rbf_grid(ExperimentConfig{});
  double best = -1.0;
  bool all_below = grid.cells.size() == 20;
  for (const auto& cell : grid.cells) {
    best = std::max(best, cell.mean_tpr);
    if (!(cell.mean_tpr < grid.vanilla_mean_tpr)) all_below = false;
  }
  return {all_below, fmt("%zu cells, best RBF %.3f vs vanilla %.3f", grid.cells.size(), best, grid.vanilla_mean_tpr)};
}

Outcome ac7(double&) {
  const auto s = run_diagnostic_study(ExperimentConfig{});
  bool ok = s.records.size() == 10 && s.pearson_r2q.r > s.pearson_frac.r;
  std::string mae;
  const std::map<int, std::size_t> expected_splits{{1, 10}, {2, 45}, {3, 120}};
  for (const auto& [k, splits] : expected_splits) {
    const auto& f = s.cv_frac.at(k);
    const auto& q = s.cv_r2q.at(k);
    ok = ok && q.mae < f.mae && f.splits == splits && q.splits == splits;
    mae += fmt(" k=%d %.3f<%.3f [%zu]", k, q.mae, f.mae, q.splits);
  }
  return {ok, fmt("r(R2_Q) %.3f > r(frac) %.3f; MAE R2_Q<frac:", s.pearson_r2q.r, s.pearson_frac.r) + mae};
}

Outcome ac8(double&) {
  const double p = pearson_p_value(0.70, 10);
  const double t = 0.70 * std::sqrt(8.0 / (1.0 - 0.49));
  const double o = oracle::student_t_two_sided(t, 8.0);
  return {std::abs(p - 0.023) < 0.002 && std::abs(p - o) < 1e-8,
          fmt("p(n=10, r=0.70) = %.5f (|p - 0.023| < 0.002), integration oracle %.5f", p, o)};
}

Outcome ac9(double&) {
  const auto b = run_burgers(ExperimentConfig{});
  const auto& v = b.methods.at(0);
  const bool uxx = std::abs(v.coef_u_xx - 0.1) <= 0.01 * 0.1;
  const bool uux = std::abs(v.coef_u_u_x + 1.0) <= 0.01;
  const bool tprs = b.methods.at(1).tpr == 1.0 && b.methods.at(2).tpr == 1.0;
  return {uxx && uux && b.r2_q < 0.3 && tprs,
          fmt("u_xx %.6f, u*u_x %.6f (1%%), R2_Q %.3f (< 0.3), naive/orth TPR %.2f/%.2f", v.coef_u_xx, v.coef_u_u_x,
              b.r2_q, b.methods.at(1).tpr, b.methods.at(2).tpr)};
}

Outcome ac10(double&) {
  ExperimentConfig c;
  c.hw_p_grid = {0.0, 0.01, 0.02};
  const auto rec = run_hw_noise(c);
  bool same = true;
  double trace = 0.0, herm = 0.0, min_eig = 1.0;
  for (const auto& v : rec) {
    if (v.p > 0.0) {
      trace = std::max(trace, v.invariants.trace_error);
      herm = std::max(herm, v.invariants.hermitian_error);
      min_eig = std::min(min_eig, v.invariants.min_eigenvalue);
    }
    if (v.method != Method::Vanilla) continue;
    for (const auto& o : rec) {
      if (o.method == Method::OrthQ && o.p == v.p && o.trial == v.trial && o.tpr != v.tpr) same = false;
    }
  }
  const bool inv = trace < 1e-10 && herm < 1e-10 && min_eig > -1e-10;
  return {same && inv && !rec.empty(),
          fmt("orth_q == vanilla per trial: %s; trace %.1e, hermitian %.1e, min eigenvalue %.1e", same ? "yes" : "no",
              trace, herm, min_eig)};
}

Outcome ac11(double&) {
  std::mt19937_64 rng(11);
  // RK4 order.
  const auto s = cubic_oscillator();
  const Vector ref = integrate(s, 0.1 / 16, 16 * 50).states.bottomRows(1).transpose();
  const double e1 = (integrate(s, 0.1, 50).states.bottomRows(1).transpose() - ref).norm();
  const double e2 = (integrate(s, 0.05, 100).states.bottomRows(1).transpose() - ref).norm();
  const double ratio = e1 / e2;
  // Projector idempotence and residual equality.
  const Matrix p = random_matrix(rng, 200, 10), q = random_matrix(rng, 200, 6), y = random_matrix(rng, 200, 2);
  const Matrix q_perp = orthogonalize(q, p).q_perp;
  const double idem = (orthogonalize(q_perp, p).q_perp - q_perp).cwiseAbs().maxCoeff();
  const Matrix a = hstack(p, q), b = hstack(p, q_perp);
  const double resid = ((y - a * least_squares(a, y)) - (y - b * least_squares(b, y))).cwiseAbs().maxCoeff();
  // Plant and recover.
  int recovered = 0;
  for (int inst = 0; inst < 20; ++inst) {
    const Matrix theta = random_matrix(rng, 200, 12);
    Matrix xi = Matrix::Zero(12, 3);
    std::uniform_real_distribution<double> mag(0.3, 2.0);
    for (Eigen::Index t = 0; t < 3; ++t) {
      std::vector<Eigen::Index> idx(12);
      std::iota(idx.begin(), idx.end(), 0);
      std::shuffle(idx.begin(), idx.end(), rng);
      for (int k = 0; k < 4; ++k) xi(idx[static_cast<std::size_t>(k)], t) = (k % 2 ? -1 : 1) * mag(rng);
    }
    const auto m = stlsq(theta, theta * xi, 0.05);
    if (m.active == (xi.array() != 0.0).matrix() && (m.xi - xi).cwiseAbs().maxCoeff() < 1e-8) ++recovered;
  }
  // Overlap invariance.
  const Matrix g = random_matrix(rng, 10, 10) + 4.0 * Matrix::Identity(10, 10);
  const double inv = std::abs(frac_variance_in_p(p * g, q) - frac_variance_in_p(p, q));
  const bool ok = ratio >= 12 && ratio <= 20 && idem < 1e-12 && resid < 1e-10 && recovered == 20 && inv < 1e-10;
  return {ok, fmt("RK4 ratio %.2f, idempotence %.1e, residual gap %.1e, planted %d/20, overlap invariance %.1e", ratio,
                  idem, resid, recovered, inv)};
}

Outcome ac12(double& seconds_limit) {
  seconds_limit = 300.0;
  const auto a = scratch("sweep_a"), b = scratch("sweep_b");
  ExperimentConfig ca, cb;
  ca.output_dir = a.string();
  cb.output_dir = b.string();
  std::ostringstream log;
  const auto t0 = std::chrono::steady_clock::now();
  const int code = cmd_sweep(ca, log);
  const double first = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const int code_b = cmd_sweep(cb, log);
  const std::string sa = slurp(a / "sweep.csv");
  const bool identical = !sa.empty() && sa == slurp(b / "sweep.csv") &&
                         slurp(a / "sweep_summary.csv") == slurp(b / "sweep_summary.csv");
  const auto rows = std::count(sa.begin(), sa.end(), '\n') - 1;
  return {code == 0 && code_b == 0 && identical && rows == 3 * 7 * 5 * 4 && first < 300.0,
          fmt("%ld rows, single sweep %.1f s (< 300 s), byte-identical CSVs: %s", static_cast<long>(rows), first,
              identical ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome(double&)>>> criteria{
      {"AC1 bias identity", ac1},     {"AC2 STLSQ preservation", ac2}, {"AC3 simulator oracle", ac3},
      {"AC4 Duffing cannibalization", ac4}, {"AC5 Lotka-Volterra zero noise", ac5}, {"AC6 RBF control", ac6},
      {"AC7 diagnostic ordering", ac7}, {"AC8 Pearson p-value", ac8},   {"AC9 Burgers", ac9},
      {"AC10 hardware noise", ac10},  {"AC11 property suites", ac11},  {"AC12 sweep performance", ac12}};
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    double limit = 0.0;
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      out = fn(limit);
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limit > 0.0 && secs >= limit) {
      out.pass = false;
      out.detail += fmt(" [over %.0f s budget]", limit);
    }
    if (!out.pass) ++failures;
    std::printf("%s %s: %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", name, out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
