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

#include "qsindy/regression.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qsindy/libraries.hpp"

namespace qsindy {

namespace {

Vector fit_column(const Matrix& theta, const Vector& y, const std::vector<bool>& active) {
  std::vector<Eigen::Index> cols;
  for (std::size_t j = 0; j < active.size(); ++j) {
    if (active[j]) cols.push_back(static_cast<Eigen::Index>(j));
  }
  Vector full = Vector::Zero(theta.cols());
  if (cols.empty()) return full;
  const Vector sub = solve_least_squares(select_columns(theta, cols), y, "stlsq");
  for (std::size_t k = 0; k < cols.size(); ++k) full(cols[k]) = sub(static_cast<Eigen::Index>(k));
  return full;
}

nlohmann::json matrix_json(const Matrix& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Matrix least_squares(const Matrix& theta, const Matrix& xdot) { return solve_least_squares(theta, xdot); }

SindyModel stlsq(const Matrix& theta, const Matrix& xdot, double lambda, int max_iter,
                 std::vector<std::string> labels, const StlsqObserver& observer) {
  if (!(lambda > 0.0)) throw std::invalid_argument("stlsq: lambda must be positive");
  if (max_iter < 1) throw std::invalid_argument("stlsq: max_iter must be at least 1");
  if (theta.rows() != xdot.rows()) throw std::invalid_argument("stlsq: row count mismatch");
  if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != theta.cols()) {
    throw std::invalid_argument("stlsq: label count does not match library width");
  }
  // Fail early on an ill-conditioned library; every subset solve is then
  // at least as well conditioned.
  LeastSquaresFactor<double>(theta).require_full_rank("stlsq");

  const Eigen::Index m = theta.cols();
  SindyModel model;
  model.xi = Matrix::Zero(m, xdot.cols());
  model.active = BoolMatrix::Constant(m, xdot.cols(), false);
  model.labels = std::move(labels);
  model.threshold = lambda;

  for (Eigen::Index t = 0; t < xdot.cols(); ++t) {
    const Vector y = xdot.col(t);
    std::vector<bool> active(static_cast<std::size_t>(m), true);
    Vector coef = Vector::Zero(m);
    int it = 0;
    bool converged = false;
    while (it < max_iter) {
      ++it;
      coef = fit_column(theta, y, active);
      if (observer) observer(t, it, active, coef);
      bool changed = false;
      for (Eigen::Index j = 0; j < m; ++j) {
        auto ju = static_cast<std::size_t>(j);
        if (active[ju] && std::abs(coef(j)) < lambda) {
          active[ju] = false;
          changed = true;
        }
      }
      if (!changed) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      // Out of iterations right after a pruning step: refit on what is left.
      coef = fit_column(theta, y, active);
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      const bool on = active[static_cast<std::size_t>(j)];
      model.active(j, t) = on;
      model.xi(j, t) = on ? coef(j) : 0.0;
    }
    model.iterations = std::max(model.iterations, it);
  }
  return model;
}

nlohmann::json SindyModel::to_json() const {
  nlohmann::json j;
  j["labels"] = labels;
  j["xi"] = matrix_json(xi);
  auto act = nlohmann::json::array();
  for (Eigen::Index i = 0; i < active.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < active.cols(); ++k) row.push_back(static_cast<bool>(active(i, k)));
    act.push_back(std::move(row));
  }
  j["active"] = std::move(act);
  j["threshold"] = threshold;
  j["iterations"] = iterations;
  return j;
}

namespace {

MatrixLd extended_fit(const MatrixLd& a, const MatrixLd& b, const std::string& what) {
  LeastSquaresFactor<long double> qr(a);
  qr.require_full_rank(what);
  return qr.solve(b);
}

MatrixLd hstack_ld(const MatrixLd& a, const MatrixLd& b) {
  MatrixLd out(a.rows(), a.cols() + b.cols());
  out.leftCols(a.cols()) = a;
  out.rightCols(b.cols()) = b;
  return out;
}

MatrixLd predict_bias_ld(const MatrixLd& p, const MatrixLd& q, const MatrixLd& xi_q_hat) {
  return extended_fit(p, q, "predict_bias") * xi_q_hat;
}

}  // namespace

Matrix predict_bias(const Matrix& p, const Matrix& q, const Matrix& xi_q_hat) {
  if (p.rows() != q.rows()) throw std::invalid_argument("predict_bias: row count mismatch");
  if (q.cols() != xi_q_hat.rows()) throw std::invalid_argument("predict_bias: xi_q_hat has wrong row count");
  return predict_bias_ld(p.cast<long double>(), q.cast<long double>(), xi_q_hat.cast<long double>()).cast<double>();
}

BiasReport bias_report(const Matrix& p, const Matrix& q, const Matrix& q_perp, const Matrix& xdot) {
  if (p.rows() != q.rows() || p.rows() != q_perp.rows() || p.rows() != xdot.rows()) {
    throw std::invalid_argument("bias_report: row count mismatch");
  }
  if (q.cols() != q_perp.cols()) throw std::invalid_argument("bias_report: Q and Q_perp widths differ");
  // Every step stays in extended precision; the observed bias is a small
  // difference of two fits and would lose digits if rounded first.
  const Eigen::Index np = p.cols();
  const MatrixLd pl = p.cast<long double>();
  const MatrixLd ql = q.cast<long double>();
  const MatrixLd yl = xdot.cast<long double>();
  const MatrixLd vanilla = extended_fit(pl, yl, "vanilla fit");
  const MatrixLd naive = extended_fit(hstack_ld(pl, ql), yl, "augmented fit");
  const MatrixLd orth = extended_fit(hstack_ld(pl, q_perp.cast<long double>()), yl, "orthogonalized fit");

  const MatrixLd observed = vanilla - naive.topRows(np);
  const MatrixLd predicted = predict_bias_ld(pl, ql, naive.bottomRows(q.cols()));
  BiasReport r;
  r.observed = observed.cast<double>();
  r.predicted = predicted.cast<double>();
  const long double denom = observed.norm();
  const long double diff = (predicted - observed).norm();
  r.max_relative_error = static_cast<double>(denom > 0 ? diff / denom : diff);
  r.orth_deviation = static_cast<double>((orth.topRows(np) - vanilla).cwiseAbs().maxCoeff());
  return r;
}

nlohmann::json BiasReport::to_json() const {
  return {{"system", system},
          {"feature_map", feature_map},
          {"predicted_bias", matrix_json(predicted)},
          {"observed_bias", matrix_json(observed)},
          {"max_relative_error", max_relative_error},
          {"orth_deviation", orth_deviation}};
}

TheoremData theorem_data(const SystemSpec& system, const FeatureMapSpec& fmap, int smooth_window) {
  const Trajectory traj = integrate(system, system.default_dt, system.default_steps());
  const DerivativeEstimate est = estimate_derivative(traj, smooth_window);
  const Matrix x = traj.states.middleRows(est.valid_rows.begin, est.valid_rows.size());
  TheoremData d;
  d.xdot = est.xdot;
  d.p = polynomial_features(x, system.poly_degree).matrix;
  d.q = evaluate(fmap, x).q;
  d.q_perp = orthogonalize(d.q, d.p).q_perp;
  return d;
}

BiasReport verify_theorems(const SystemSpec& system, const FeatureMapSpec& fmap, double tol) {
  const TheoremData d = theorem_data(system, fmap);
  BiasReport r = bias_report(d.p, d.q, d.q_perp, d.xdot);
  r.system = system.name;
  r.feature_map = std::string(to_string(fmap.kind));
  if (!r.within(tol)) {
    std::ostringstream msg;
    msg << system.name << "+" << r.feature_map << ": relative bias error " << r.max_relative_error
        << ", orth deviation " << r.orth_deviation << " (bound " << tol << ")";
    throw VerificationError(msg.str());
  }
  return r;
}

double verify_stlsq_preservation(const Matrix& theta_orth, Eigen::Index n_poly, const Matrix& xdot, double lambda) {
  if (n_poly < 1 || n_poly > theta_orth.cols()) throw std::invalid_argument("n_poly out of range");
  const SindyModel orth = stlsq(theta_orth, xdot, lambda);
  const Matrix p = theta_orth.leftCols(n_poly);
  double worst = 0.0;
  for (Eigen::Index t = 0; t < xdot.cols(); ++t) {
    std::vector<Eigen::Index> support;
    for (Eigen::Index j = 0; j < n_poly; ++j) {
      if (orth.active(j, t)) support.push_back(j);
    }
    Vector restricted = Vector::Zero(n_poly);
    if (!support.empty()) {
      const SindyModel vanilla = stlsq(select_columns(p, support), xdot.col(t), lambda);
      for (std::size_t k = 0; k < support.size(); ++k) {
        restricted(support[k]) = vanilla.xi(static_cast<Eigen::Index>(k), 0);
      }
    }
    worst = std::max(worst, (orth.xi.col(t).head(n_poly) - restricted).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace qsindy
