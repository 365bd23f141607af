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

// Exact small-register simulator: state vectors, density matrices with
// single-qubit depolarizing noise, and Pauli-string expectation values.
//
// Conventions:
//   * qubit 0 is the most significant bit of the basis-state index;
//   * rotations use the half-angle form R_P(theta) = exp(-i theta P / 2);
//   * R_ZZ(theta) = exp(-i theta Z x Z / 2).

#pragma once

#include <array>
#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qsindy::qsim {

using Complex = std::complex<double>;

inline constexpr int kMaxQubits = 4;
inline constexpr std::size_t kMaxGates = 64;

enum class GateKind { H, RX, RY, RZ, RZZ, CNOT };

std::string_view to_string(GateKind kind);

struct Gate {
  GateKind kind = GateKind::H;
  std::array<int, 2> qubits{0, 0};  ///< for CNOT: {control, target}
  double angle = 0.0;

  int arity() const { return kind == GateKind::RZZ || kind == GateKind::CNOT ? 2 : 1; }
  std::span<const int> targets() const { return {qubits.data(), static_cast<std::size_t>(arity())}; }

  static Gate h(int q) { return {GateKind::H, {q, q}, 0.0}; }
  static Gate rx(int q, double theta) { return {GateKind::RX, {q, q}, theta}; }
  static Gate ry(int q, double theta) { return {GateKind::RY, {q, q}, theta}; }
  static Gate rz(int q, double theta) { return {GateKind::RZ, {q, q}, theta}; }
  static Gate rzz(int a, int b, double theta) { return {GateKind::RZZ, {a, b}, theta}; }
  static Gate cnot(int control, int target) { return {GateKind::CNOT, {control, target}, 0.0}; }
};

/// Ordered gate list on a fixed register. Invariants are checked on add().
class Circuit {
 public:
  explicit Circuit(int n_qubits);

  Circuit& add(const Gate& gate);

  int n_qubits() const { return n_qubits_; }
  std::span<const Gate> gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }

 private:
  int n_qubits_;
  std::vector<Gate> gates_;
};

enum class Pauli : unsigned char { I, X, Y, Z };

/// Tensor product of single-qubit Paulis, one factor per qubit.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::vector<Pauli> factors) : factors_(std::move(factors)) {}

  /// Parses "ZIX"-style text; throws std::invalid_argument on other characters.
  static PauliString parse(std::string_view text);

  int n_qubits() const { return static_cast<int>(factors_.size()); }
  Pauli operator[](int q) const { return factors_[static_cast<std::size_t>(q)]; }
  std::span<const Pauli> factors() const { return factors_; }

  /// Basis-index mask of qubits the string flips (X or Y factors).
  std::size_t flip_mask() const;
  /// Phase picked up by |j> under the string: P|j> = phase(j) |j ^ flip_mask>.
  Complex phase(std::size_t basis_index) const;

  std::string text() const;
  /// Compact observable name, e.g. "Z0Z1" or "X2".
  std::string name() const;

 private:
  std::vector<Pauli> factors_;
};

class PureState {
 public:
  explicit PureState(int n_qubits);  ///< |0...0>

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const { return amplitudes_; }

  void apply(const Gate& gate);
  double norm_squared() const;

 private:
  int n_qubits_;
  std::vector<Complex> amplitudes_;
};

class DensityState {
 public:
  explicit DensityState(int n_qubits);  ///< |0...0><0...0|
  DensityState(int n_qubits, Eigen::MatrixXcd rho);

  int n_qubits() const { return n_qubits_; }
  const Eigen::MatrixXcd& rho() const { return rho_; }

  void apply(const Gate& gate);
  /// rho -> (1-p) rho + p/3 (X rho X + Y rho Y + Z rho Z) on qubit q.
  void depolarize(int q, double p);

 private:
  int n_qubits_;
  Eigen::MatrixXcd rho_;
};

/// Deviation of a density matrix from its physical invariants.
struct DensityInvariants {
  double trace_error = 0.0;      ///< |Tr rho - 1|
  double hermitian_error = 0.0;  ///< max |rho - rho^dagger|
  double min_eigenvalue = 0.0;

  bool ok() const { return trace_error <= 1e-10 && hermitian_error <= 1e-10 && min_eigenvalue >= -1e-9; }
};

DensityInvariants check_invariants(const DensityState& state);

PureState run_pure(const Circuit& circuit);

/// Density-matrix evolution with a single-qubit depolarizing channel of
/// strength p applied to each qubit a gate touches, right after the gate.
DensityState run_noisy(const Circuit& circuit, double p);

double expectation(const PureState& state, const PauliString& obs);
double expectation(const DensityState& state, const PauliString& obs);

}  // namespace qsindy::qsim
