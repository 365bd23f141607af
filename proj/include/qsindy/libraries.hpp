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

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qsindy/feature_maps.hpp"
#include "qsindy/linalg.hpp"

namespace qsindy {

enum class FeatureFamily { Poly, Quantum, Rbf };

/// Named column matrix. A polynomial block, when present, is leading and
/// contiguous.
struct FeatureLibrary {
  Matrix matrix;
  std::vector<std::string> labels;
  std::vector<FeatureFamily> family;

  Eigen::Index rows() const { return matrix.rows(); }
  Eigen::Index cols() const { return matrix.cols(); }
  /// Number of leading POLY columns.
  Eigen::Index poly_columns() const;
  void validate() const;
};

/// All monomials of total degree <= `degree` (constant included), graded
/// lexicographic. Labels use x0, x1, ... unless `variable_names` is given.
FeatureLibrary polynomial_features(const Matrix& x, int degree,
                                   std::span<const std::string> variable_names = {});

/// Gaussian kernel columns exp(-gamma ||x - l_j||^2), labelled "rbf:j".
FeatureLibrary rbf_features(const Matrix& x, const Matrix& landmarks, double gamma);

/// Wraps quantum expectation values as a library block.
FeatureLibrary quantum_library(const QuantumFeatures& features);

/// 1 / median pairwise squared distance over at most 500 stride-sampled rows.
/// Throws DegenerateError if that median is 0.
double median_bandwidth(const Matrix& x);

/// Rows round(k N / L) for k = 0..L-1.
Matrix select_landmarks(const Matrix& x, int count);

/// [a, b]; labels must stay unique.
FeatureLibrary concat(const FeatureLibrary& a, const FeatureLibrary& b);

struct OrthogonalizedLibrary {
  Matrix q_perp;            ///< Q - P A
  Matrix projection_coeffs; ///< A = argmin ||P A - Q||
};

/// Projects Q onto the orthogonal complement of col(P) through a pivoted QR
/// solve. Throws RankDeficiencyError if cond(P) > 1e12.
OrthogonalizedLibrary orthogonalize(const Matrix& q, const Matrix& p);

/// Writes the label header followed by rows.
void write_library_csv(std::ostream& out, const FeatureLibrary& lib);

}  // namespace qsindy
