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

#include "qsindy/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <stdexcept>

namespace qsindy {

namespace {

constexpr double kDivergenceBound = 1e6;

template <typename State, typename Field>
State rk4_step(const Field& f, const State& x, double dt) {
  const State k1 = f(x);
  const State k2 = f(State(x + 0.5 * dt * k1));
  const State k3 = f(State(x + 0.5 * dt * k2));
  const State k4 = f(State(x + dt * k3));
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

int SystemSpec::default_steps() const {
  return static_cast<int>(std::lround(default_duration / default_dt));
}

SystemSpec duffing() {
  SystemSpec s;
  s.name = "duffing";
  s.dimension = 2;
  s.rhs = [](const Vector& x) { return vec({x(1), -x(0) - 0.3 * x(0) * x(0) * x(0) - 0.1 * x(1)}); };
  s.initial_condition = vec({1.0, 0.0});
  s.poly_degree = 3;
  s.stlsq_threshold = 0.05;
  s.true_coefficients = {{0, "x1", 1.0}, {1, "x0", -1.0}, {1, "x1", -0.1}, {1, "x0^3", -0.3}};
  return s;
}

SystemSpec van_der_pol() {
  constexpr double mu = 1.0;
  SystemSpec s;
  s.name = "van_der_pol";
  s.dimension = 2;
  s.rhs = [](const Vector& x) { return vec({x(1), mu * (1.0 - x(0) * x(0)) * x(1) - x(0)}); };
  s.initial_condition = vec({2.0, 0.0});
  s.poly_degree = 3;
  s.stlsq_threshold = 0.05;
  s.true_coefficients = {{0, "x1", 1.0}, {1, "x0", -1.0}, {1, "x1", mu}, {1, "x0^2*x1", -mu}};
  return s;
}

SystemSpec lorenz() {
  constexpr double sigma = 10.0, rho = 28.0, beta = 8.0 / 3.0;
  SystemSpec s;
  s.name = "lorenz";
  s.dimension = 3;
  s.rhs = [](const Vector& x) {
    return vec({sigma * (x(1) - x(0)), x(0) * (rho - x(2)) - x(1), x(0) * x(1) - beta * x(2)});
  };
  s.initial_condition = vec({1.0, 1.0, 1.0});
  s.poly_degree = 2;
  s.stlsq_threshold = 0.1;
  s.true_coefficients = {{0, "x0", -sigma}, {0, "x1", sigma},     {1, "x0", rho},  {1, "x1", -1.0},
                         {1, "x0*x2", -1.0}, {2, "x2", -beta}, {2, "x0*x1", 1.0}};
  s.default_dt = 0.002;
  s.default_duration = 20.0;
  return s;
}

SystemSpec lotka_volterra() {
  SystemSpec s;
  s.name = "lotka_volterra";
  s.dimension = 2;
  s.rhs = [](const Vector& x) {
    return vec({2.0 / 3.0 * x(0) - 4.0 / 3.0 * x(0) * x(1), x(0) * x(1) - x(1)});
  };
  s.initial_condition = vec({1.0, 1.0});
  s.poly_degree = 2;
  s.stlsq_threshold = 0.05;
  s.true_coefficients = {{0, "x0", 2.0 / 3.0}, {0, "x0*x1", -4.0 / 3.0}, {1, "x1", -1.0}, {1, "x0*x1", 1.0}};
  return s;
}

SystemSpec cubic_oscillator() {
  SystemSpec s;
  s.name = "cubic_oscillator";
  s.dimension = 2;
  s.rhs = [](const Vector& x) { return vec({x(1), -x(0) * x(0) * x(0)}); };
  s.initial_condition = vec({1.0, 0.0});
  s.poly_degree = 3;
  s.stlsq_threshold = 0.05;
  s.true_coefficients = {{0, "x1", 1.0}, {1, "x0^3", -1.0}};
  return s;
}

SystemSpec rossler() {
  constexpr double a = 0.2, b = 0.2, c = 5.7;
  SystemSpec s;
  s.name = "rossler";
  s.dimension = 3;
  s.rhs = [](const Vector& x) { return vec({-x(1) - x(2), x(0) + a * x(1), b + x(2) * (x(0) - c)}); };
  s.initial_condition = vec({1.0, 1.0, 1.0});
  s.poly_degree = 2;
  s.stlsq_threshold = 0.1;
  s.true_coefficients = {{0, "x1", -1.0}, {0, "x2", -1.0}, {1, "x0", 1.0}, {1, "x1", a},
                         {2, "1", b},     {2, "x2", -c},   {2, "x0*x2", 1.0}};
  s.default_dt = 0.002;
  s.default_duration = 20.0;
  return s;
}

std::vector<SystemSpec> benchmark_systems() {
  return {duffing(), van_der_pol(), lorenz(), lotka_volterra(), cubic_oscillator(), rossler()};
}

SystemSpec system_by_name(std::string_view name) {
  if (name == "duffing") return duffing();
  if (name == "van_der_pol" || name == "vdp") return van_der_pol();
  if (name == "lorenz") return lorenz();
  if (name == "lotka_volterra" || name == "lv") return lotka_volterra();
  if (name == "cubic_oscillator" || name == "cubic") return cubic_oscillator();
  if (name == "rossler") return rossler();
  throw std::invalid_argument("unknown system: " + std::string(name));
}

void Trajectory::validate() const {
  if (states.rows() < 10) {
    throw std::invalid_argument("trajectory needs at least 10 rows");
  }
  if (times.size() != states.rows()) {
    throw std::invalid_argument("trajectory times/states length mismatch");
  }
  if (!states.allFinite() || !times.allFinite()) {
    throw std::invalid_argument("trajectory contains NaN or Inf");
  }
  if (!(dt > 0.0)) {
    throw std::invalid_argument("trajectory dt must be positive");
  }
  for (Eigen::Index i = 0; i + 1 < times.size(); ++i) {
    if (std::abs((times(i + 1) - times(i)) - dt) > 1e-12 * std::max(1.0, std::abs(times(i + 1)))) {
      throw std::invalid_argument("trajectory grid is not uniform");
    }
  }
}

Trajectory integrate(const SystemSpec& spec, double dt, int n_steps) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (n_steps < 10) throw std::invalid_argument("integrate: n_steps must be >= 10");
  if (spec.initial_condition.size() != spec.dimension) {
    throw std::invalid_argument("integrate: initial condition does not match dimension");
  }

  Trajectory traj;
  traj.dt = dt;
  traj.times = Vector::LinSpaced(n_steps + 1, 0.0, dt * n_steps);
  traj.states.resize(n_steps + 1, spec.dimension);

  Vector x = spec.initial_condition;
  traj.states.row(0) = x.transpose();
  for (int i = 1; i <= n_steps; ++i) {
    x = rk4_step(spec.rhs, x, dt);
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > kDivergenceBound) {
      throw DivergenceError(spec.name + ": trajectory diverged at step " + std::to_string(i));
    }
    traj.states.row(i) = x.transpose();
  }
  return traj;
}

Trajectory add_noise(const Trajectory& traj, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("add_noise: sigma must be non-negative");
  Trajectory out = traj;
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  // Row-major draw order so the stream is independent of Eigen's storage.
  for (Eigen::Index i = 0; i < out.states.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.states.cols(); ++j) {
      out.states(i, j) += noise(rng);
    }
  }
  return out;
}

DerivativeEstimate estimate_derivative(const Trajectory& traj, int smooth_window) {
  if (smooth_window < 1 || smooth_window % 2 == 0) {
    throw std::invalid_argument("estimate_derivative: window must be a positive odd integer");
  }
  const Eigen::Index n = traj.size();
  const Eigen::Index half = smooth_window / 2;
  const Eigen::Index trim = half + 1;
  if (n - 2 * trim < 10) {
    throw WindowTooLargeError("estimate_derivative: window " + std::to_string(smooth_window) +
                              " leaves fewer than 10 rows");
  }

  // Moving average is only needed on [half, n - half).
  Matrix smooth = Matrix::Zero(n, traj.dimension());
  for (Eigen::Index i = half; i < n - half; ++i) {
    smooth.row(i) = traj.states.middleRows(i - half, smooth_window).colwise().mean();
  }

  DerivativeEstimate est;
  est.valid_rows = {trim, n - trim};
  est.xdot.resize(est.valid_rows.size(), traj.dimension());
  const double inv = 1.0 / (2.0 * traj.dt);
  for (Eigen::Index i = trim; i < n - trim; ++i) {
    est.xdot.row(i - trim) = (smooth.row(i + 1) - smooth.row(i - 1)) * inv;
  }
  return est;
}

Matrix assemble_true_xi(const SystemSpec& spec, std::span<const std::string> column_labels) {
  Matrix xi = Matrix::Zero(static_cast<Eigen::Index>(column_labels.size()), spec.dimension);
  for (const auto& term : spec.true_coefficients) {
    auto it = std::find(column_labels.begin(), column_labels.end(), term.label);
    if (it == column_labels.end()) {
      throw MissingLabelError(spec.name + ": library has no column '" + term.label + "'");
    }
    xi(it - column_labels.begin(), term.target) = term.value;
  }
  return xi;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t";
  for (Eigen::Index j = 0; j < traj.dimension(); ++j) out << ",x" << j;
  out << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < traj.size(); ++i) {
    out << traj.times(i);
    for (Eigen::Index j = 0; j < traj.dimension(); ++j) out << ',' << traj.states(i, j);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------

namespace {

struct PeriodicStencil {
  double dx;

  Vector first(const Vector& u) const {
    const Eigen::Index n = u.size();
    Vector d(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      d(i) = (u((i + 1) % n) - u((i + n - 1) % n)) / (2.0 * dx);
    }
    return d;
  }

  Vector second(const Vector& u) const {
    const Eigen::Index n = u.size();
    Vector d(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      d(i) = (u((i + 1) % n) - 2.0 * u(i) + u((i + n - 1) % n)) / (dx * dx);
    }
    return d;
  }
};

}  // namespace

PdeField solve_burgers(const BurgersSetup& setup) {
  if (!(setup.nu > 0.0)) throw std::invalid_argument("solve_burgers: nu must be positive");
  if (setup.n_x < 8 || setup.n_t < 1 || setup.sample_every < 1) {
    throw std::invalid_argument("solve_burgers: grid too small");
  }
  const double dx = setup.domain_length / setup.n_x;
  const double dt = setup.t_final / setup.n_t;
  // RK4 on the diffusion eigenvalue -4 nu / dx^2 is stable below ~2.78.
  if (dt * 4.0 * setup.nu / (dx * dx) > 2.5) {
    throw std::invalid_argument("solve_burgers: time step violates the diffusive stability limit");
  }

  const PeriodicStencil stencil{dx};
  const Vector x = Vector::LinSpaced(setup.n_x, 0.0, dx * (setup.n_x - 1));
  const double center = 0.5 * setup.domain_length;
  std::function<double(double)> u0 = setup.u0;
  if (!u0) u0 = [center](double xi) { return std::exp(-(xi - center) * (xi - center) / 0.5); };

  Vector u(setup.n_x);
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = u0(x(i));
  const double initial_max = u.cwiseAbs().maxCoeff();

  const double nu = setup.nu;
  auto rhs = [&](const Vector& v) -> Vector {
    return nu * stencil.second(v) - v.cwiseProduct(stencil.first(v));
  };

  const int n_samples = setup.n_t / setup.sample_every + 1;
  PdeField field;
  field.nu = nu;
  field.grid_x = x;
  field.grid_t.resize(n_samples);
  field.u.resize(n_samples, setup.n_x);

  int sample = 0;
  field.grid_t(sample) = 0.0;
  field.u.row(sample++) = u.transpose();
  for (int step = 1; step <= setup.n_t; ++step) {
    u = rk4_step(rhs, u, dt);
    const double umax = u.cwiseAbs().maxCoeff();
    if (!std::isfinite(umax) || umax > 10.0 * std::max(initial_max, 1e-300)) {
      throw InstabilityError("solve_burgers: solution grew beyond 10x its initial maximum at step " +
                             std::to_string(step));
    }
    if (step % setup.sample_every == 0 && sample < n_samples) {
      field.grid_t(sample) = step * dt;
      field.u.row(sample++) = u.transpose();
    }
  }

  field.u_x.resize(n_samples, setup.n_x);
  field.u_xx.resize(n_samples, setup.n_x);
  for (int k = 0; k < n_samples; ++k) {
    const Vector row = field.u.row(k).transpose();
    field.u_x.row(k) = stencil.first(row).transpose();
    field.u_xx.row(k) = stencil.second(row).transpose();
  }
  return field;
}

PdeRegressionData burgers_regression_data(const PdeField& field) {
  const Eigen::Index nt = field.u.rows();
  const Eigen::Index nx = field.u.cols();
  if (nt < 3) throw std::invalid_argument("burgers_regression_data: need at least 3 snapshots");
  const double dts = field.grid_t(1) - field.grid_t(0);

  PdeRegressionData data;
  data.features.resize((nt - 2) * nx, 3);
  data.u_t.resize((nt - 2) * nx, 1);
  Eigen::Index r = 0;
  for (Eigen::Index k = 1; k + 1 < nt; ++k) {
    for (Eigen::Index i = 0; i < nx; ++i, ++r) {
      data.features(r, 0) = field.u(k, i);
      data.features(r, 1) = field.u_x(k, i);
      data.features(r, 2) = field.u_xx(k, i);
      data.u_t(r, 0) = (field.u(k + 1, i) - field.u(k - 1, i)) / (2.0 * dts);
    }
  }
  return data;
}

}  // namespace qsindy
