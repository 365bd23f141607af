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

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qsindy/linalg.hpp"

namespace qsindy {

using VectorField = std::function<Vector(const Vector&)>;

/// One nonzero entry of the ground-truth coefficient matrix.
struct TrueTerm {
  int target = 0;     ///< state index whose derivative carries the term
  std::string label;  ///< polynomial column label, e.g. "x0^2*x1"
  double value = 0.0;
};

/// A benchmark ODE together with its library configuration.
struct SystemSpec {
  std::string name;
  int dimension = 0;
  VectorField rhs;
  Vector initial_condition;
  int poly_degree = 0;
  double stlsq_threshold = 0.0;
  std::vector<TrueTerm> true_coefficients;
  double default_dt = 0.01;
  double default_duration = 10.0;

  int default_steps() const;
};

SystemSpec duffing();
SystemSpec van_der_pol();
SystemSpec lorenz();
SystemSpec lotka_volterra();
SystemSpec cubic_oscillator();
SystemSpec rossler();

/// The six benchmark systems in canonical order.
std::vector<SystemSpec> benchmark_systems();

/// Lookup by canonical name or short alias ("vdp", "lv", "cubic").
/// Throws std::invalid_argument for unknown names.
SystemSpec system_by_name(std::string_view name);

struct Trajectory {
  Vector times;
  Matrix states;  ///< N x d
  double dt = 0.0;

  Eigen::Index size() const { return states.rows(); }
  Eigen::Index dimension() const { return states.cols(); }
  /// Throws std::invalid_argument if the type invariants are broken.
  void validate() const;
};

/// Half-open row range [begin, end) into a trajectory.
struct RowRange {
  Eigen::Index begin = 0;
  Eigen::Index end = 0;
  Eigen::Index size() const { return end - begin; }
};

struct DerivativeEstimate {
  Matrix xdot;
  RowRange valid_rows;
};

/// Fixed-step RK4 from spec.initial_condition; returns n_steps + 1 rows.
/// Throws DivergenceError once any state magnitude exceeds 1e6.
Trajectory integrate(const SystemSpec& spec, double dt, int n_steps);

/// Additive i.i.d. Gaussian observation noise from a seeded generator.
Trajectory add_noise(const Trajectory& traj, double sigma, std::uint64_t seed);

/// Centered moving average of width `smooth_window` followed by second-order
/// centered differences. Trims smooth_window/2 + 1 rows at each end.
DerivativeEstimate estimate_derivative(const Trajectory& traj, int smooth_window);

/// Dense p x d coefficient matrix with the system's true terms placed against
/// `column_labels`. Throws MissingLabelError if a term has no column.
Matrix assemble_true_xi(const SystemSpec& spec, std::span<const std::string> column_labels);

/// Writes `t,x0,...,x{d-1}` CSV.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

// ---------------------------------------------------------------------------
// Viscous Burgers equation u_t = nu u_xx - u u_x on a periodic domain.

struct BurgersSetup {
  double nu = 0.1;
  int n_x = 256;
  int n_t = 2000;  ///< RK4 steps over [0, t_final]
  double domain_length = 6.283185307179586;
  double t_final = 2.0;
  int sample_every = 10;
  std::function<double(double)> u0;  ///< defaults to exp(-(x - L/2)^2 / 0.5)
};

struct PdeField {
  Vector grid_x;
  Vector grid_t;
  Matrix u;     ///< N_t x N_x snapshots
  Matrix u_x;   ///< centered first difference of u
  Matrix u_xx;  ///< centered second difference of u
  double nu = 0.0;
};

/// Method-of-lines solve: periodic centered differences in space, RK4 in time.
/// Throws std::invalid_argument if the explicit step is outside the diffusive
/// stability limit, InstabilityError if max |u| exceeds 10x its initial value.
PdeField solve_burgers(const BurgersSetup& setup);

/// Pointwise regression data for PDE identification.
struct PdeRegressionData {
  Matrix features;  ///< rows (u, u_x, u_xx)
  Matrix u_t;       ///< one column
};

/// Centered time differences over interior snapshots, paired with the
/// spatial features at the same points.
PdeRegressionData burgers_regression_data(const PdeField& field);

}  // namespace qsindy
