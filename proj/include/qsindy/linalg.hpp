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

#include <Eigen/Dense>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qsindy/errors.hpp"

namespace qsindy {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using MatrixLd = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

/// Largest condition number accepted by the least-squares solvers.
inline constexpr double kMaxConditionNumber = 1e12;

/// Column-pivoted Householder QR of a tall matrix together with its 2-norm
/// condition number. The condition number comes from the singular values of
/// the triangular factor, which are those of the original matrix.
template <typename Scalar>
class LeastSquaresFactor {
 public:
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  explicit LeastSquaresFactor(const Mat& a) : qr_(a) {
    const Eigen::Index n = a.cols();
    if (n == 0) {
      condition_ = 1.0;
      return;
    }
    const Eigen::Index k = std::min(a.rows(), n);
    Mat r = qr_.matrixQR().topLeftCorner(k, n).template triangularView<Eigen::Upper>();
    Eigen::JacobiSVD<Mat> svd(r);
    const auto& s = svd.singularValues();
    const Scalar smax = s(0);
    const Scalar smin = k < n ? Scalar(0) : s(k - 1);
    condition_ = smin > Scalar(0) ? static_cast<double>(smax / smin)
                                  : std::numeric_limits<double>::infinity();
  }

  double condition_number() const { return condition_; }

  /// Throws RankDeficiencyError when the condition number is above the limit.
  void require_full_rank(const std::string& what) const {
    if (!(condition_ <= kMaxConditionNumber)) {
      throw RankDeficiencyError(what + ": condition number " + std::to_string(condition_) +
                                " exceeds " + std::to_string(kMaxConditionNumber));
    }
  }

  Mat solve(const Mat& b) const { return qr_.solve(b); }

 private:
  Eigen::ColPivHouseholderQR<Mat> qr_;
  double condition_ = 0.0;
};

/// 2-norm condition number of a matrix (infinity if rank deficient).
double condition_number(const Matrix& a);

/// Minimizer of ||a x - b||_F. Throws RankDeficiencyError past kMaxConditionNumber.
Matrix solve_least_squares(const Matrix& a, const Matrix& b, const std::string& what = "least squares");

/// Same solve carried out in extended precision, rounded back to double.
Matrix solve_least_squares_extended(const Matrix& a, const Matrix& b,
                                    const std::string& what = "least squares");

/// Columns of `a` listed in `cols`, in order.
Matrix select_columns(const Matrix& a, std::span<const Eigen::Index> cols);

/// [a, b] horizontally concatenated; row counts must match.
Matrix hstack(const Matrix& a, const Matrix& b);

}  // namespace qsindy
