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

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qsindy/dynamics.hpp"
#include "qsindy/feature_maps.hpp"
#include "qsindy/linalg.hpp"

namespace qsindy {

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Minimizer of ||xdot - theta xi||_F. Throws RankDeficiencyError when
/// theta is ill-conditioned or has fewer rows than columns.
Matrix least_squares(const Matrix& theta, const Matrix& xdot);

struct SindyModel {
  Matrix xi;          ///< m x d
  BoolMatrix active;  ///< same shape; xi is zero wherever this is false
  std::vector<std::string> labels;
  double threshold = 0.0;
  int iterations = 0;  ///< largest iteration count over target columns

  nlohmann::json to_json() const;
};

/// Called once per least-squares solve inside stlsq with the target column,
/// the 1-based iteration, the active mask for that column and the fitted
/// coefficients (zero off the mask).
using StlsqObserver = std::function<void(Eigen::Index target, int iteration,
                                         const std::vector<bool>& active, const Vector& coefficients)>;

/// Sequentially thresholded least squares, run independently per column of
/// xdot. Coefficients with |xi| < lambda are dropped and the remainder refit
/// until the active set stops changing or max_iter solves have been made.
SindyModel stlsq(const Matrix& theta, const Matrix& xdot, double lambda, int max_iter = 20,
                 std::vector<std::string> labels = {}, const StlsqObserver& observer = {});

/// (P^T P)^{-1} P^T Q xi_q_hat, evaluated through a factorized solve in
/// extended precision.
Matrix predict_bias(const Matrix& p, const Matrix& q, const Matrix& xi_q_hat);

struct BiasReport {
  std::string system;
  std::string feature_map;
  Matrix predicted;  ///< p x d
  Matrix observed;   ///< xi_P(vanilla) - xi_P([P, Q]), p x d
  double max_relative_error = 0.0;  ///< ||predicted - observed||_F / ||observed||_F
  double orth_deviation = 0.0;      ///< max |xi_P([P, Q_perp]) - xi_P(vanilla)|

  bool within(double tol) const { return max_relative_error < tol && orth_deviation < tol; }
  nlohmann::json to_json() const;
};

/// Three independent least-squares fits (P, [P, Q], [P, q_perp]) compared
/// against the predicted bias. q_perp is passed in so callers can check a
/// perturbed projection.
BiasReport bias_report(const Matrix& p, const Matrix& q, const Matrix& q_perp, const Matrix& xdot);

/// P, Q and Q_perp on the noise-free default trajectory of `system`, with
/// xdot from the smoothed finite-difference estimator. The exact vector
/// field would lie in col(P) and leave no bias to measure.
struct TheoremData {
  Matrix p;
  Matrix q;
  Matrix q_perp;
  Matrix xdot;
};

TheoremData theorem_data(const SystemSpec& system, const FeatureMapSpec& fmap, int smooth_window = 5);

/// bias_report on theorem_data, checked to `tol`. Throws VerificationError
/// with the offending magnitudes.
BiasReport verify_theorems(const SystemSpec& system, const FeatureMapSpec& fmap, double tol = 1e-12);

/// Runs STLSQ on [P, Q_perp] (P = leading n_poly columns), then refits STLSQ
/// on P restricted to the surviving polynomial support of each target.
/// Returns the largest absolute difference over polynomial coefficients.
double verify_stlsq_preservation(const Matrix& theta_orth, Eigen::Index n_poly, const Matrix& xdot,
                                 double lambda);

}  // namespace qsindy
