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

#include <span>
#include <string>
#include <vector>

#include "qsindy/linalg.hpp"
#include "qsindy/regression.hpp"

namespace qsindy {

struct TermOutcome {
  std::string label;
  Eigen::Index target = 0;
  bool recovered = false;
  double recovered_value = 0.0;
  double true_value = 0.0;
};

struct RecoveryScore {
  double tpr = 0.0;
  std::vector<TermOutcome> per_term;
};

/// A true term counts when it is active, has the right sign and lies within
/// 50% of the true value (boundary included). Spurious terms are ignored.
/// Throws LabelMismatchError if the shapes or labels disagree.
RecoveryScore tpr(const SindyModel& model, const Matrix& xi_true,
                  std::span<const std::string> true_labels);

/// ||P P^+ Q||_F^2 / ||Q||_F^2. Throws DegenerateError if Q is zero.
double frac_variance_in_p(const Matrix& p, const Matrix& q);

/// 1 - ||Xdot - Q Q^+ Xdot||_F^2 / ||Xdot - mean||_F^2.
/// Throws DegenerateError if every column of Xdot is constant.
double r2_q(const Matrix& q, const Matrix& xdot);

inline double severity(double tpr_vanilla, double tpr_naive) { return tpr_vanilla - tpr_naive; }

struct PearsonResult {
  double r = 0.0;
  double p_value = 1.0;  ///< two-sided
};

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Two-sided p-value of a sample correlation r over n points.
double pearson_p_value(double r, std::size_t n);

/// Throws DegenerateError when either input has zero variance or n < 3.
PearsonResult pearson(std::span<const double> x, std::span<const double> y);

struct CvResult {
  double mae = 0.0;
  std::size_t splits = 0;
};

/// Exhaustive leave-k-out cross-validation of a univariate OLS (slope and
/// intercept) predicting `severity` from `diagnostic`. A constant training
/// diagnostic predicts the training mean.
CvResult leave_k_out_mae(std::span<const double> diagnostic, std::span<const double> severity, int k);

struct DiagnosticRecord {
  std::string system;
  std::string feature_map;
  double frac_var_in_p = 0.0;
  double r2_q = 0.0;
  double severity = 0.0;
};

}  // namespace qsindy
