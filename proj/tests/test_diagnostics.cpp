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

#include <random>

#include "oracles/stats_oracles.hpp"
#include "qsindy/diagnostics.hpp"
#include "qsindy/libraries.hpp"

using namespace qsindy;

namespace {

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = n(rng);
  return m;
}

Matrix orthogonal(std::mt19937_64& rng, Eigen::Index n) {
  return Eigen::HouseholderQR<Matrix>(random_matrix(rng, n, n)).householderQ();
}

SindyModel model_of(const Matrix& xi) {
  SindyModel m;
  m.xi = xi;
  m.active = xi.array() != 0.0;
  m.labels = {"1", "x0", "x1"};
  m.threshold = 0.1;
  return m;
}

const std::vector<std::string> kLabels{"1", "x0", "x1"};

}  // namespace

TEST_CASE("true positive rate") {
  Matrix truth(3, 2);
  truth << 0, 0, 1, -2, 0, 3;
  CHECK(tpr(model_of(truth), truth, kLabels).tpr == 1.0);
  CHECK(tpr(model_of(Matrix::Zero(3, 2)), truth, kLabels).tpr == 0.0);

  Matrix fit = truth;
  fit(1, 0) = 1.49;
  CHECK(tpr(model_of(fit), truth, kLabels).tpr == 1.0);
  fit(1, 0) = 1.5;
  CHECK(tpr(model_of(fit), truth, kLabels).tpr == 1.0);
  fit(1, 0) = 1.51;
  CHECK(std::abs(tpr(model_of(fit), truth, kLabels).tpr - 2.0 / 3.0) < 1e-15);
  fit(1, 0) = -1.0;
  CHECK(std::abs(tpr(model_of(fit), truth, kLabels).tpr - 2.0 / 3.0) < 1e-15);

  SUBCASE("spurious terms are ignored") {
    Matrix extra = truth;
    extra(0, 0) = 5.0;
    CHECK(tpr(model_of(extra), truth, kLabels).tpr == 1.0);
  }
  SUBCASE("monotone in correctly recovered terms") {
    Matrix partial = Matrix::Zero(3, 2);
    double last = tpr(model_of(partial), truth, kLabels).tpr;
    for (Eigen::Index i = 0; i < truth.size(); ++i) {
      if (truth(i) == 0.0) continue;
      partial(i) = truth(i);
      const double now = tpr(model_of(partial), truth, kLabels).tpr;
      CHECK(now >= last);
      last = now;
    }
  }
  SUBCASE("mismatches") {
    const std::vector<std::string> other{"1", "x1", "x0"};
    CHECK_THROWS_AS(tpr(model_of(truth), truth, other), LabelMismatchError);
    CHECK_THROWS_AS(tpr(model_of(truth), truth.topRows(2), kLabels), LabelMismatchError);
  }
}

TEST_CASE("column-space overlap") {
  std::mt19937_64 rng(1);
  const Matrix p = random_matrix(rng, 200, 6);
  CHECK(std::abs(frac_variance_in_p(p, p * random_matrix(rng, 6, 4)) - 1.0) < 1e-10);
  const Matrix q = random_matrix(rng, 200, 4);
  CHECK(std::abs(frac_variance_in_p(p, orthogonalize(q, p).q_perp)) < 1e-10);
  CHECK_THROWS_AS(frac_variance_in_p(p, Matrix::Zero(200, 3)), DegenerateError);

  SUBCASE("invariant under column recombination of P") {
    const double base = frac_variance_in_p(p, q);
    for (int t = 0; t < 5; ++t) {
      const Matrix g = random_matrix(rng, 6, 6) + 3.0 * Matrix::Identity(6, 6);
      CHECK(std::abs(frac_variance_in_p(p * g, q) - base) < 1e-10);
    }
    const double v = frac_variance_in_p(p, q + p * random_matrix(rng, 6, 4));
    CHECK(v >= 0.0);
    CHECK(v <= 1.0 + 1e-10);
  }
}

TEST_CASE("Duffing ZZ2 overlap is high") {
  const auto d = theorem_data(duffing(), FeatureMapSpec::make(FeatureMapKind::ZZ2));
  const double v = frac_variance_in_p(d.p, d.q);
  CHECK(v >= 0.90);
  CHECK(v <= 0.99);
}

TEST_CASE("R^2 of the quantum library") {
  std::mt19937_64 rng(2);
  const Matrix xdot = random_matrix(rng, 500, 2);

  CHECK(std::abs(r2_q(hstack(xdot, random_matrix(rng, 500, 3)), xdot) - 1.0) < 1e-10);
  CHECK(r2_q(random_matrix(rng, 500, 6), xdot) < 0.05);
  CHECK_THROWS_AS(r2_q(random_matrix(rng, 500, 3), Matrix::Constant(500, 2, 4.0)), DegenerateError);

  SUBCASE("orthogonal recombination and nesting") {
    for (int t = 0; t < 5; ++t) {
      const Matrix q = random_matrix(rng, 500, 6);
      const Matrix y = q * random_matrix(rng, 6, 2) + random_matrix(rng, 500, 2);
      const double base = r2_q(q, y);
      CHECK(std::abs(r2_q(q * orthogonal(rng, 6), y) - base) < 1e-10);
      CHECK(r2_q(q.leftCols(5), y) <= base + 1e-12);
      CHECK(base <= 1.0);
    }
  }
}

TEST_CASE("severity") {
  CHECK(std::abs(severity(1.0, 0.40) - 0.60) < 1e-15);
  CHECK(severity(1.0, 1.0) == 0.0);
  CHECK(severity(1.0, 0.0) == 1.0);
}

TEST_CASE("Pearson correlation") {
  std::vector<double> x{1, 2, 3, 4, 5, 6};
  std::vector<double> y, z;
  for (double v : x) {
    y.push_back(2 * v + 1);
    z.push_back(-v);
  }
  const auto pos = pearson(x, y);
  CHECK(std::abs(pos.r - 1.0) < 1e-12);
  CHECK(pos.p_value < 1e-12);
  CHECK(std::abs(pearson(x, z).r + 1.0) < 1e-12);

  CHECK(std::abs(pearson_p_value(0.70, 10) - 0.024) < 0.002);
  CHECK(std::abs(pearson_p_value(0.55, 10) - 0.099) < 0.002);
  CHECK(pearson_p_value(0.0, 10) == doctest::Approx(1.0));

  SUBCASE("matches numerical integration of the t density") {
    for (double r : {0.1, 0.3, 0.55, 0.7, 0.9, -0.4}) {
      for (std::size_t n : {5u, 10u, 30u}) {
        const double df = static_cast<double>(n) - 2.0;
        const double t = r * std::sqrt(df / (1.0 - r * r));
        CHECK(std::abs(pearson_p_value(r, n) - oracle::student_t_two_sided(t, df)) < 1e-8);
      }
    }
  }
  SUBCASE("affine invariance") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    std::vector<double> a(20), b(20), a2(20), b2(20);
    for (int i = 0; i < 20; ++i) {
      a[i] = nd(rng);
      b[i] = a[i] + nd(rng);
      a2[i] = 3.5 * a[i] - 2.0;
      b2[i] = 0.25 * b[i] + 7.0;
    }
    CHECK(std::abs(pearson(a, b).r - pearson(a2, b2).r) < 1e-12);
  }
  SUBCASE("degenerate input") {
    std::vector<double> c(6, 1.0);
    CHECK_THROWS_AS(pearson(x, c), DegenerateError);
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{2, 3}), DegenerateError);
  }
}

TEST_CASE("incomplete beta") {
  CHECK(incomplete_beta(1.0, 1.0, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(incomplete_beta(2.0, 3.0, 1.0) == 1.0);
  // I_x(a, b) + I_{1-x}(b, a) = 1
  CHECK(incomplete_beta(2.5, 0.5, 0.4) + incomplete_beta(0.5, 2.5, 0.6) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("leave-k-out cross-validation") {
  std::vector<double> d{0.1, 0.5, 0.2, 0.9, 0.3, 0.7, 0.4, 0.8, 0.6, 0.05};
  std::vector<double> lin;
  for (double v : d) lin.push_back(3.0 * v - 1.0);
  for (int k = 1; k <= 3; ++k) CHECK(leave_k_out_mae(d, lin, k).mae < 1e-12);
  CHECK(leave_k_out_mae(d, lin, 1).splits == 10);
  CHECK(leave_k_out_mae(d, lin, 2).splits == 45);
  CHECK(leave_k_out_mae(d, lin, 3).splits == 120);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> s(10);
  for (auto& v : s) v = u(rng);
  for (int k = 1; k <= 3; ++k) {
    int splits = 0;
    const double expected = oracle::brute_force_cv(d, s, k, &splits);
    const auto got = leave_k_out_mae(d, s, k);
    CHECK(std::abs(got.mae - expected) < 1e-12);
    CHECK(got.splits == static_cast<std::size_t>(splits));
  }

  SUBCASE("constant diagnostic predicts the training mean") {
    const std::vector<double> flat(10, 0.5);
    for (int k = 1; k <= 3; ++k) {
      int splits = 0;
      CHECK(std::abs(leave_k_out_mae(flat, s, k).mae - oracle::brute_force_cv(flat, s, k, &splits)) < 1e-12);
    }
  }
  SUBCASE("k = 1 matches an independent holdout loop") {
    double total = 0.0;
    for (int h = 0; h < 10; ++h) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (int i = 0; i < 10; ++i) {
        if (i == h) continue;
        sx += d[i];
        sy += s[i];
        sxx += d[i] * d[i];
        sxy += d[i] * s[i];
      }
      const double slope = (9 * sxy - sx * sy) / (9 * sxx - sx * sx);
      const double icpt = (sy - slope * sx) / 9;
      total += std::abs(s[h] - (icpt + slope * d[h]));
    }
    CHECK(std::abs(leave_k_out_mae(d, s, 1).mae - total / 10) < 1e-12);
  }
}
