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

#include "qsindy/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qsindy {

RecoveryScore tpr(const SindyModel& model, const Matrix& xi_true, std::span<const std::string> true_labels) {
  if (xi_true.rows() > model.xi.rows() || xi_true.cols() != model.xi.cols()) {
    throw LabelMismatchError("tpr: true coefficient matrix shape does not fit the model");
  }
  if (static_cast<Eigen::Index>(true_labels.size()) != xi_true.rows()) {
    throw LabelMismatchError("tpr: true label count does not match coefficient rows");
  }
  for (std::size_t i = 0; i < true_labels.size(); ++i) {
    if (i >= model.labels.size() || model.labels[i] != true_labels[i]) {
      throw LabelMismatchError("tpr: label '" + true_labels[i] + "' is not at the same model column");
    }
  }
  RecoveryScore score;
  std::size_t hits = 0;
  for (Eigen::Index t = 0; t < xi_true.cols(); ++t) {
    for (Eigen::Index i = 0; i < xi_true.rows(); ++i) {
      const double c = xi_true(i, t);
      if (c == 0.0) continue;
      const double v = model.xi(i, t);
      const bool ok = model.active(i, t) && std::signbit(v) == std::signbit(c) && v != 0.0 &&
                      std::abs(v - c) <= 0.5 * std::abs(c);
      hits += ok ? 1 : 0;
      score.per_term.push_back({true_labels[static_cast<std::size_t>(i)], t, ok, v, c});
    }
  }
  score.tpr = score.per_term.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(score.per_term.size());
  return score;
}

double frac_variance_in_p(const Matrix& p, const Matrix& q) {
  const double total = q.squaredNorm();
  if (!(total > 0.0)) throw DegenerateError("frac_variance_in_p: Q is zero");
  const Matrix proj = p * solve_least_squares(p, q, "frac_variance_in_p");
  return proj.squaredNorm() / total;
}

double r2_q(const Matrix& q, const Matrix& xdot) {
  const Matrix centered = xdot.rowwise() - xdot.colwise().mean();
  const double total = centered.squaredNorm();
  if (!(total > 0.0)) throw DegenerateError("r2_q: Xdot is constant");
  const Matrix resid = xdot - q * solve_least_squares(q, xdot, "r2_q");
  return 1.0 - resid.squaredNorm() / total;
}

// Continued fraction for I_x(a, b) by the modified Lentz method.
namespace {

double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete_beta: a and b must be positive");
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("incomplete_beta: x must lie in [0, 1]");
  if (x == 0.0 || x == 1.0) return x;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double pearson_p_value(double r, std::size_t n) {
  if (n < 3) throw DegenerateError("pearson: need at least three points");
  const double df = static_cast<double>(n - 2);
  const double r2 = std::min(r * r, 1.0);
  if (r2 >= 1.0) return 0.0;
  // P(|T| > |t|) with t^2 = df r^2 / (1 - r^2) equals I_{1-r^2}(df/2, 1/2).
  return incomplete_beta(0.5 * df, 0.5, 1.0 - r2);
}

PearsonResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  const std::size_t n = x.size();
  if (n < 3) throw DegenerateError("pearson: need at least three points");
  const Eigen::Map<const Vector> xv(x.data(), static_cast<Eigen::Index>(n));
  const Eigen::Map<const Vector> yv(y.data(), static_cast<Eigen::Index>(n));
  const Vector xc = xv.array() - xv.mean();
  const Vector yc = yv.array() - yv.mean();
  const double sx = xc.norm();
  const double sy = yc.norm();
  if (!(sx > 0.0) || !(sy > 0.0)) throw DegenerateError("pearson: zero variance input");
  PearsonResult out;
  out.r = std::clamp(xc.dot(yc) / (sx * sy), -1.0, 1.0);
  out.p_value = pearson_p_value(out.r, n);
  return out;
}

CvResult leave_k_out_mae(std::span<const double> diagnostic, std::span<const double> severity, int k) {
  const auto n = static_cast<int>(diagnostic.size());
  if (static_cast<int>(severity.size()) != n) throw std::invalid_argument("leave_k_out_mae: length mismatch");
  if (k < 1 || n - k < 1) throw std::invalid_argument("leave_k_out_mae: k out of range");

  // Enumerate k-subsets in lexicographic order.
  std::vector<int> held(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) held[static_cast<std::size_t>(i)] = i;
  CvResult out;
  double abs_sum = 0.0;
  std::size_t count = 0;
  std::vector<bool> is_held(static_cast<std::size_t>(n));
  while (true) {
    std::fill(is_held.begin(), is_held.end(), false);
    for (int h : held) is_held[static_cast<std::size_t>(h)] = true;
    double mx = 0.0, my = 0.0;
    int m = 0;
    for (int i = 0; i < n; ++i) {
      if (is_held[static_cast<std::size_t>(i)]) continue;
      mx += diagnostic[static_cast<std::size_t>(i)];
      my += severity[static_cast<std::size_t>(i)];
      ++m;
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
      if (is_held[static_cast<std::size_t>(i)]) continue;
      const double dx = diagnostic[static_cast<std::size_t>(i)] - mx;
      sxx += dx * dx;
      sxy += dx * (severity[static_cast<std::size_t>(i)] - my);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    for (int h : held) {
      const double pred = my + slope * (diagnostic[static_cast<std::size_t>(h)] - mx);
      abs_sum += std::abs(pred - severity[static_cast<std::size_t>(h)]);
      ++count;
    }
    ++out.splits;

    int i = k - 1;
    while (i >= 0 && held[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++held[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) held[static_cast<std::size_t>(j)] = held[static_cast<std::size_t>(j - 1)] + 1;
  }
  out.mae = abs_sum / static_cast<double>(count);
  return out;
}

}  // namespace qsindy
