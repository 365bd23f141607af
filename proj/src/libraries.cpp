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

#include "qsindy/libraries.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <set>
#include <stdexcept>

namespace qsindy {

namespace {

// Exponent vectors of all monomials in `d` variables with total degree <= D,
// graded, and lexicographic within a degree (x0^2 < x0*x1 < x1^2).
std::vector<std::vector<int>> monomial_exponents(int d, int degree) {
  std::vector<std::vector<int>> out;
  for (int deg = 0; deg <= degree; ++deg) {
    // Non-decreasing variable index sequences of length deg.
    std::vector<int> idx(static_cast<std::size_t>(deg), 0);
    while (true) {
      std::vector<int> e(static_cast<std::size_t>(d), 0);
      for (int v : idx) ++e[static_cast<std::size_t>(v)];
      out.push_back(std::move(e));
      int k = deg - 1;
      while (k >= 0 && idx[static_cast<std::size_t>(k)] == d - 1) --k;
      if (k < 0) break;
      const int next = idx[static_cast<std::size_t>(k)] + 1;
      for (int j = k; j < deg; ++j) idx[static_cast<std::size_t>(j)] = next;
    }
  }
  return out;
}

std::string monomial_label(const std::vector<int>& e, std::span<const std::string> names) {
  std::string s;
  for (std::size_t v = 0; v < e.size(); ++v) {
    if (e[v] == 0) continue;
    if (!s.empty()) s += '*';
    s += names.empty() ? "x" + std::to_string(v) : names[v];
    if (e[v] > 1) s += "^" + std::to_string(e[v]);
  }
  return s.empty() ? "1" : s;
}

}  // namespace

Eigen::Index FeatureLibrary::poly_columns() const {
  Eigen::Index n = 0;
  while (n < static_cast<Eigen::Index>(family.size()) && family[static_cast<std::size_t>(n)] == FeatureFamily::Poly) ++n;
  return n;
}

void FeatureLibrary::validate() const {
  if (static_cast<Eigen::Index>(labels.size()) != matrix.cols() ||
      static_cast<Eigen::Index>(family.size()) != matrix.cols()) {
    throw std::invalid_argument("library label/family count does not match column count");
  }
  std::set<std::string> seen(labels.begin(), labels.end());
  if (seen.size() != labels.size()) throw std::invalid_argument("library labels are not unique");
  const Eigen::Index lead = poly_columns();
  for (std::size_t j = static_cast<std::size_t>(lead); j < family.size(); ++j) {
    if (family[j] == FeatureFamily::Poly) throw std::invalid_argument("polynomial block is not leading and contiguous");
  }
}

FeatureLibrary polynomial_features(const Matrix& x, int degree, std::span<const std::string> variable_names) {
  const auto d = static_cast<int>(x.cols());
  if (degree < 1 || degree > 3) throw std::invalid_argument("polynomial degree must be 1, 2 or 3");
  if (d < 1 || d > 3) throw std::invalid_argument("polynomial library supports 1 to 3 variables");
  if (!variable_names.empty() && static_cast<int>(variable_names.size()) != d) {
    throw std::invalid_argument("variable name count does not match data dimension");
  }

  const auto exps = monomial_exponents(d, degree);
  FeatureLibrary lib;
  lib.matrix.resize(x.rows(), static_cast<Eigen::Index>(exps.size()));
  for (std::size_t j = 0; j < exps.size(); ++j) {
    Vector col = Vector::Ones(x.rows());
    for (int v = 0; v < d; ++v) {
      for (int k = 0; k < exps[j][static_cast<std::size_t>(v)]; ++k) col = col.cwiseProduct(x.col(v));
    }
    lib.matrix.col(static_cast<Eigen::Index>(j)) = col;
    lib.labels.push_back(monomial_label(exps[j], variable_names));
    lib.family.push_back(FeatureFamily::Poly);
  }
  return lib;
}

FeatureLibrary rbf_features(const Matrix& x, const Matrix& landmarks, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("rbf gamma must be positive");
  if (landmarks.rows() < 1) throw std::invalid_argument("rbf needs at least one landmark");
  if (landmarks.cols() != x.cols()) throw std::invalid_argument("landmark dimension mismatch");
  FeatureLibrary lib;
  lib.matrix.resize(x.rows(), landmarks.rows());
  for (Eigen::Index j = 0; j < landmarks.rows(); ++j) {
    const Vector d2 = (x.rowwise() - landmarks.row(j)).rowwise().squaredNorm();
    lib.matrix.col(j) = (-gamma * d2.array()).exp().matrix();
    lib.labels.push_back("rbf:" + std::to_string(j));
    lib.family.push_back(FeatureFamily::Rbf);
  }
  return lib;
}

FeatureLibrary quantum_library(const QuantumFeatures& features) {
  FeatureLibrary lib;
  lib.matrix = features.q;
  lib.labels = features.column_labels;
  lib.family.assign(features.column_labels.size(), FeatureFamily::Quantum);
  return lib;
}

double median_bandwidth(const Matrix& x) {
  if (x.rows() < 2) throw std::invalid_argument("median_bandwidth needs at least two points");
  constexpr Eigen::Index kMaxRows = 500;
  const Eigen::Index stride = (x.rows() + kMaxRows - 1) / kMaxRows;
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < x.rows() && static_cast<Eigen::Index>(rows.size()) < kMaxRows; i += stride) {
    rows.push_back(i);
  }
  std::vector<double> d2;
  d2.reserve(rows.size() * (rows.size() - 1) / 2);
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = a + 1; b < rows.size(); ++b) {
      d2.push_back((x.row(rows[a]) - x.row(rows[b])).squaredNorm());
    }
  }
  if (d2.empty()) throw DegenerateError("median_bandwidth: fewer than two sampled points");
  // Median of an even-length sample is the mean of the two middle values.
  const std::size_t mid = d2.size() / 2;
  std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid), d2.end());
  double median = d2[mid];
  if (d2.size() % 2 == 0) {
    const double lower = *std::max_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }
  if (!(median > 0.0)) throw DegenerateError("median_bandwidth: median pairwise distance is zero");
  return 1.0 / median;
}

Matrix select_landmarks(const Matrix& x, int count) {
  const Eigen::Index n = x.rows();
  if (count < 1 || count > n) throw std::invalid_argument("landmark count must lie in [1, N]");
  Matrix out(count, x.cols());
  for (int k = 0; k < count; ++k) {
    auto row = static_cast<Eigen::Index>(std::llround(static_cast<double>(k) * static_cast<double>(n) / count));
    out.row(k) = x.row(std::min(row, n - 1));
  }
  return out;
}

FeatureLibrary concat(const FeatureLibrary& a, const FeatureLibrary& b) {
  FeatureLibrary out;
  out.matrix = hstack(a.matrix, b.matrix);
  out.labels = a.labels;
  out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
  out.family = a.family;
  out.family.insert(out.family.end(), b.family.begin(), b.family.end());
  out.validate();
  return out;
}

OrthogonalizedLibrary orthogonalize(const Matrix& q, const Matrix& p) {
  if (q.rows() != p.rows()) throw std::invalid_argument("orthogonalize: row count mismatch");
  OrthogonalizedLibrary out;
  out.projection_coeffs = solve_least_squares(p, q, "orthogonalize");
  out.q_perp = q - p * out.projection_coeffs;
  return out;
}

void write_library_csv(std::ostream& out, const FeatureLibrary& lib) {
  for (std::size_t j = 0; j < lib.labels.size(); ++j) out << (j ? "," : "") << lib.labels[j];
  out << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < lib.rows(); ++i) {
    for (Eigen::Index j = 0; j < lib.cols(); ++j) out << (j ? "," : "") << lib.matrix(i, j);
    out << '\n';
  }
}

}  // namespace qsindy
