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

#include "qsindy/qsim.hpp"

#include <cmath>
#include <stdexcept>

namespace qsindy::qsim {

namespace {

constexpr Complex kI{0.0, 1.0};

std::size_t bit_mask(int n_qubits, int q) { return std::size_t{1} << (n_qubits - 1 - q); }

using Mat2 = std::array<Complex, 4>;  // row-major

Mat2 single_qubit_matrix(const Gate& g) {
  const double c = std::cos(0.5 * g.angle);
  const double s = std::sin(0.5 * g.angle);
  switch (g.kind) {
    case GateKind::H: {
      const double r = 1.0 / std::sqrt(2.0);
      return {r, r, r, -r};
    }
    case GateKind::RX:
      return {c, -kI * s, -kI * s, c};
    case GateKind::RY:
      return {c, -s, s, c};
    case GateKind::RZ:
      return {std::polar(1.0, -0.5 * g.angle), 0.0, 0.0, std::polar(1.0, 0.5 * g.angle)};
    default:
      throw std::logic_error("not a single-qubit gate");
  }
}

// Applies the gate in place to 2^n contiguous amplitudes.
void apply_to_vector(const Gate& g, int n_qubits, Complex* v) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  switch (g.kind) {
    case GateKind::H:
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ: {
      const Mat2 u = single_qubit_matrix(g);
      const std::size_t m = bit_mask(n_qubits, g.qubits[0]);
      for (std::size_t i = 0; i < dim; ++i) {
        if (i & m) continue;
        const Complex a0 = v[i];
        const Complex a1 = v[i | m];
        v[i] = u[0] * a0 + u[1] * a1;
        v[i | m] = u[2] * a0 + u[3] * a1;
      }
      break;
    }
    case GateKind::RZZ: {
      const std::size_t ma = bit_mask(n_qubits, g.qubits[0]);
      const std::size_t mb = bit_mask(n_qubits, g.qubits[1]);
      const Complex same = std::polar(1.0, -0.5 * g.angle);
      const Complex diff = std::polar(1.0, 0.5 * g.angle);
      for (std::size_t i = 0; i < dim; ++i) {
        const bool parity = ((i & ma) != 0) != ((i & mb) != 0);
        v[i] *= parity ? diff : same;
      }
      break;
    }
    case GateKind::CNOT: {
      const std::size_t mc = bit_mask(n_qubits, g.qubits[0]);
      const std::size_t mt = bit_mask(n_qubits, g.qubits[1]);
      for (std::size_t i = 0; i < dim; ++i) {
        if ((i & mc) && !(i & mt)) std::swap(v[i], v[i | mt]);
      }
      break;
    }
  }
}

// U rho U^dagger through two column sweeps: rho <- U rho, then
// rho <- (U rho^dagger)^dagger.
void conjugate(const Gate& g, int n_qubits, Eigen::MatrixXcd& rho) {
  for (Eigen::Index c = 0; c < rho.cols(); ++c) apply_to_vector(g, n_qubits, rho.col(c).data());
  rho.adjointInPlace();
  for (Eigen::Index c = 0; c < rho.cols(); ++c) apply_to_vector(g, n_qubits, rho.col(c).data());
  rho.adjointInPlace();
}

void check_gate(const Gate& g, int n_qubits) {
  for (int q : g.targets()) {
    if (q < 0 || q >= n_qubits) throw std::invalid_argument("gate qubit index out of range");
  }
  if (g.arity() == 2 && g.qubits[0] == g.qubits[1]) {
    throw std::invalid_argument("two-qubit gate needs distinct qubits");
  }
}

}  // namespace

std::string_view to_string(GateKind kind) {
  switch (kind) {
    case GateKind::H: return "H";
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::RZZ: return "RZZ";
    case GateKind::CNOT: return "CNOT";
  }
  return "?";
}

Circuit::Circuit(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) throw std::invalid_argument("unsupported qubit count");
}

Circuit& Circuit::add(const Gate& gate) {
  check_gate(gate, n_qubits_);
  if (gates_.size() >= kMaxGates) throw std::invalid_argument("circuit exceeds gate limit");
  gates_.push_back(gate);
  return *this;
}

// ---------------------------------------------------------------------------

PauliString PauliString::parse(std::string_view text) {
  std::vector<Pauli> f;
  f.reserve(text.size());
  for (char ch : text) {
    switch (ch) {
      case 'I': f.push_back(Pauli::I); break;
      case 'X': f.push_back(Pauli::X); break;
      case 'Y': f.push_back(Pauli::Y); break;
      case 'Z': f.push_back(Pauli::Z); break;
      default: throw std::invalid_argument("invalid Pauli label: " + std::string(text));
    }
  }
  return PauliString(std::move(f));
}

std::size_t PauliString::flip_mask() const {
  std::size_t m = 0;
  for (int q = 0; q < n_qubits(); ++q) {
    if (factors_[q] == Pauli::X || factors_[q] == Pauli::Y) m |= bit_mask(n_qubits(), q);
  }
  return m;
}

Complex PauliString::phase(std::size_t basis_index) const {
  Complex ph{1.0, 0.0};
  for (int q = 0; q < n_qubits(); ++q) {
    const bool one = (basis_index & bit_mask(n_qubits(), q)) != 0;
    switch (factors_[q]) {
      case Pauli::Y: ph *= one ? -kI : kI; break;
      case Pauli::Z: if (one) ph = -ph; break;
      default: break;
    }
  }
  return ph;
}

std::string PauliString::text() const {
  std::string s;
  for (Pauli p : factors_) s.push_back("IXYZ"[static_cast<int>(p)]);
  return s;
}

std::string PauliString::name() const {
  std::string s;
  for (int q = 0; q < n_qubits(); ++q) {
    if (factors_[q] == Pauli::I) continue;
    s.push_back("IXYZ"[static_cast<int>(factors_[q])]);
    s += std::to_string(q);
  }
  return s.empty() ? "I" : s;
}

// ---------------------------------------------------------------------------

PureState::PureState(int n_qubits) : n_qubits_(n_qubits), amplitudes_(std::size_t{1} << n_qubits) {
  amplitudes_[0] = 1.0;
}

void PureState::apply(const Gate& gate) {
  check_gate(gate, n_qubits_);
  apply_to_vector(gate, n_qubits_, amplitudes_.data());
}

double PureState::norm_squared() const {
  double s = 0.0;
  for (const auto& a : amplitudes_) s += std::norm(a);
  return s;
}

DensityState::DensityState(int n_qubits)
    : n_qubits_(n_qubits),
      rho_(Eigen::MatrixXcd::Zero(Eigen::Index{1} << n_qubits, Eigen::Index{1} << n_qubits)) {
  rho_(0, 0) = 1.0;
}

DensityState::DensityState(int n_qubits, Eigen::MatrixXcd rho) : n_qubits_(n_qubits), rho_(std::move(rho)) {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  if (rho_.rows() != dim || rho_.cols() != dim) throw std::invalid_argument("density matrix has wrong size");
}

void DensityState::apply(const Gate& gate) {
  check_gate(gate, n_qubits_);
  conjugate(gate, n_qubits_, rho_);
}

void DensityState::depolarize(int q, double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("depolarizing strength must lie in [0, 1]");
  if (q < 0 || q >= n_qubits_) throw std::invalid_argument("qubit index out of range");
  if (p == 0.0) return;
  Eigen::MatrixXcd out = (1.0 - p) * rho_;
  const Eigen::Index dim = rho_.rows();
  for (Pauli pauli : {Pauli::X, Pauli::Y, Pauli::Z}) {
    std::vector<Pauli> f(static_cast<std::size_t>(n_qubits_), Pauli::I);
    f[static_cast<std::size_t>(q)] = pauli;
    const PauliString ps(std::move(f));
    const std::size_t m = ps.flip_mask();
    // (P rho P)_{ij} = phase(i^m) rho_{i^m, j^m} phase(j)
    for (Eigen::Index j = 0; j < dim; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      const Complex pj = ps.phase(jj);
      for (Eigen::Index i = 0; i < dim; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        out(i, j) += (p / 3.0) * ps.phase(ii ^ m) * rho_(static_cast<Eigen::Index>(ii ^ m),
                                                          static_cast<Eigen::Index>(jj ^ m)) * pj;
      }
    }
  }
  rho_ = std::move(out);
}

DensityInvariants check_invariants(const DensityState& state) {
  const auto& rho = state.rho();
  DensityInvariants inv;
  inv.trace_error = std::abs(rho.trace() - Complex{1.0, 0.0});
  inv.hermitian_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  inv.min_eigenvalue = es.eigenvalues().minCoeff();
  return inv;
}

PureState run_pure(const Circuit& circuit) {
  PureState state(circuit.n_qubits());
  for (const auto& g : circuit.gates()) state.apply(g);
  return state;
}

DensityState run_noisy(const Circuit& circuit, double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("depolarizing strength must lie in [0, 1]");
  DensityState state(circuit.n_qubits());
  for (const auto& g : circuit.gates()) {
    state.apply(g);
    for (int q : g.targets()) state.depolarize(q, p);
  }
  return state;
}

double expectation(const PureState& state, const PauliString& obs) {
  if (obs.n_qubits() != state.n_qubits()) throw std::invalid_argument("observable size mismatch");
  const auto amps = state.amplitudes();
  const std::size_t m = obs.flip_mask();
  Complex acc{0.0, 0.0};
  for (std::size_t j = 0; j < amps.size(); ++j) acc += std::conj(amps[j ^ m]) * obs.phase(j) * amps[j];
  if (std::abs(acc.imag()) > 1e-10) throw std::logic_error("expectation value is not real");
  return acc.real();
}

double expectation(const DensityState& state, const PauliString& obs) {
  if (obs.n_qubits() != state.n_qubits()) throw std::invalid_argument("observable size mismatch");
  const auto& rho = state.rho();
  const std::size_t m = obs.flip_mask();
  Complex acc{0.0, 0.0};
  for (std::size_t j = 0; j < static_cast<std::size_t>(rho.rows()); ++j) {
    acc += rho(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j ^ m)) * obs.phase(j);
  }
  if (std::abs(acc.imag()) > 1e-10) throw std::logic_error("expectation value is not real");
  return acc.real();
}

}  // namespace qsindy::qsim
