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

#include "qsindy/linalg.hpp"

#include <stdexcept>

namespace qsindy {

double condition_number(const Matrix& a) {
  return LeastSquaresFactor<double>(a).condition_number();
}

Matrix solve_least_squares(const Matrix& a, const Matrix& b, const std::string& what) {
  if (a.rows() != b.rows()) {
    throw std::invalid_argument(what + ": row count mismatch");
  }
  if (a.rows() < a.cols()) {
    throw RankDeficiencyError(what + ": fewer rows than columns");
  }
  LeastSquaresFactor<double> f(a);
  f.require_full_rank(what);
  return f.solve(b);
}

Matrix solve_least_squares_extended(const Matrix& a, const Matrix& b, const std::string& what) {
  if (a.rows() != b.rows()) {
    throw std::invalid_argument(what + ": row count mismatch");
  }
  if (a.rows() < a.cols()) {
    throw RankDeficiencyError(what + ": fewer rows than columns");
  }
  LeastSquaresFactor<long double> f(a.cast<long double>());
  f.require_full_rank(what);
  return f.solve(b.cast<long double>()).cast<double>();
}

Matrix select_columns(const Matrix& a, std::span<const Eigen::Index> cols) {
  Matrix out(a.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) = a.col(cols[j]);
  }
  return out;
}

Matrix hstack(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw std::invalid_argument("hstack: row count mismatch");
  }
  Matrix out(a.rows(), a.cols() + b.cols());
  out.leftCols(a.cols()) = a;
  out.rightCols(b.cols()) = b;
  return out;
}

}  // namespace qsindy
