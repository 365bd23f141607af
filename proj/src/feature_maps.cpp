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

#include "qsindy/feature_maps.hpp"

#include <algorithm>
#include <cctype>
#include <numbers>
#include <stdexcept>

namespace qsindy {

using qsim::Circuit;
using qsim::Gate;
using qsim::PauliString;

std::string_view to_string(FeatureMapKind kind) {
  switch (kind) {
    case FeatureMapKind::ZZ2: return "zz2";
    case FeatureMapKind::ZZ3: return "zz3";
    case FeatureMapKind::IQP: return "iqp";
    case FeatureMapKind::Reupload: return "reupload";
  }
  return "?";
}

FeatureMapKind parse_feature_map(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "zz2" || s == "zz") return FeatureMapKind::ZZ2;
  if (s == "zz3") return FeatureMapKind::ZZ3;
  if (s == "iqp") return FeatureMapKind::IQP;
  if (s == "reupload" || s == "re-up" || s == "reup") return FeatureMapKind::Reupload;
  throw std::invalid_argument("unknown feature map: " + std::string(text));
}

FeatureMapSpec FeatureMapSpec::make(FeatureMapKind kind) {
  return make(kind, kind == FeatureMapKind::ZZ3);
}

FeatureMapSpec FeatureMapSpec::make(FeatureMapKind kind, bool rescale) {
  FeatureMapSpec spec;
  spec.kind = kind;
  spec.rescale = rescale;
  if (kind == FeatureMapKind::ZZ3) {
    spec.n_qubits = 3;
    for (const char* o : {"ZII", "IZI", "IIZ", "XII", "IXI", "IIX", "ZZI", "IZZ", "ZIZ"}) {
      spec.observables.push_back(PauliString::parse(o));
    }
  } else {
    spec.n_qubits = 2;
    for (const char* o : {"ZI", "IZ", "XI", "IX", "ZZ", "XX"}) {
      spec.observables.push_back(PauliString::parse(o));
    }
  }
  if (kind == FeatureMapKind::Reupload) {
    spec.fixed_params.assign(kReuploadAngles.begin(), kReuploadAngles.end());
  }
  return spec;
}

void FeatureMapSpec::validate() const {
  const bool three = kind == FeatureMapKind::ZZ3;
  if (n_qubits != (three ? 3 : 2)) throw std::invalid_argument("feature map has wrong qubit count");
  if (observables.size() != (three ? 9u : 6u)) throw std::invalid_argument("feature map has wrong observable count");
  for (const auto& o : observables) {
    if (o.n_qubits() != n_qubits) throw std::invalid_argument("observable size mismatch");
  }
  const bool needs_params = kind == FeatureMapKind::Reupload;
  if (needs_params != !fixed_params.empty()) {
    throw std::invalid_argument("fixed_params must be present exactly for the re-uploading map");
  }
  if (needs_params && fixed_params.size() != kReuploadAngles.size()) {
    throw std::invalid_argument("re-uploading map needs 18 fixed angles");
  }
}

Circuit build_circuit(const FeatureMapSpec& spec, std::span<const double> x) {
  if (static_cast<int>(x.size()) != spec.input_arity()) {
    throw ArityError(std::string(to_string(spec.kind)) + " expects " + std::to_string(spec.input_arity()) +
                     " inputs, got " + std::to_string(x.size()));
  }
  Circuit c(spec.n_qubits);
  switch (spec.kind) {
    case FeatureMapKind::ZZ2:
      c.add(Gate::rx(0, x[0])).add(Gate::rx(1, x[1]));
      c.add(Gate::cnot(0, 1)).add(Gate::rz(1, x[0] * x[1])).add(Gate::cnot(0, 1));
      c.add(Gate::ry(0, x[0])).add(Gate::ry(1, x[1]));
      break;
    case FeatureMapKind::ZZ3: {
      for (int q = 0; q < 3; ++q) c.add(Gate::rx(q, x[q]));
      constexpr std::array<std::array<int, 2>, 3> ring{{{0, 1}, {1, 2}, {2, 0}}};
      for (auto [a, b] : ring) {
        c.add(Gate::cnot(a, b)).add(Gate::rz(b, x[a] * x[b])).add(Gate::cnot(a, b));
      }
      for (int q = 0; q < 3; ++q) c.add(Gate::ry(q, x[q]));
      break;
    }
    case FeatureMapKind::IQP:
      for (int layer = 0; layer < 2; ++layer) {
        c.add(Gate::h(0)).add(Gate::h(1));
        c.add(Gate::rz(0, x[0])).add(Gate::rz(1, x[1]));
        c.add(Gate::rzz(0, 1, x[0] * x[1]));
      }
      break;
    case FeatureMapKind::Reupload: {
      const auto& w = spec.fixed_params;
      for (std::size_t layer = 0; layer < 3; ++layer) {
        c.add(Gate::rx(0, x[0])).add(Gate::rx(1, x[1]));
        for (int q = 0; q < 2; ++q) {
          const std::size_t base = layer * 6 + static_cast<std::size_t>(q) * 3;
          c.add(Gate::rz(q, w[base])).add(Gate::ry(q, w[base + 1])).add(Gate::rx(q, w[base + 2]));
        }
        c.add(Gate::cnot(0, 1));
      }
      break;
    }
  }
  return c;
}

QuantumFeatures evaluate(const FeatureMapSpec& spec, const Matrix& x, double p_noise) {
  spec.validate();
  if (x.cols() != spec.input_arity()) {
    throw ArityError(std::string(to_string(spec.kind)) + " expects " + std::to_string(spec.input_arity()) +
                     "-dimensional data, got " + std::to_string(x.cols()));
  }
  if (!x.allFinite()) throw std::invalid_argument("evaluate: non-finite input");
  if (p_noise < 0.0 || p_noise > 1.0) throw std::invalid_argument("evaluate: p_noise must lie in [0, 1]");

  QuantumFeatures out;
  out.map_kind = spec.kind;
  if (spec.rescale && x.size() > 0) {
    const double max_abs = x.cwiseAbs().maxCoeff();
    if (max_abs > 0.0) out.scale = std::numbers::pi / (2.0 * max_abs);
  }
  for (const auto& o : spec.observables) out.column_labels.push_back("q:" + o.name());

  const auto n_obs = static_cast<Eigen::Index>(spec.observables.size());
  out.q.resize(x.rows(), n_obs);
  out.worst_invariants = {};
  out.worst_invariants.min_eigenvalue = p_noise > 0.0 ? 1.0 : 0.0;

  std::vector<double> point(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) point[static_cast<std::size_t>(j)] = out.scale * x(i, j);
    const Circuit circuit = build_circuit(spec, point);
    if (p_noise == 0.0) {
      const auto state = qsim::run_pure(circuit);
      for (Eigen::Index k = 0; k < n_obs; ++k) out.q(i, k) = qsim::expectation(state, spec.observables[k]);
    } else {
      const auto state = qsim::run_noisy(circuit, p_noise);
      const auto inv = qsim::check_invariants(state);
      auto& w = out.worst_invariants;
      w.trace_error = std::max(w.trace_error, inv.trace_error);
      w.hermitian_error = std::max(w.hermitian_error, inv.hermitian_error);
      w.min_eigenvalue = std::min(w.min_eigenvalue, inv.min_eigenvalue);
      for (Eigen::Index k = 0; k < n_obs; ++k) out.q(i, k) = qsim::expectation(state, spec.observables[k]);
    }
  }
  return out;
}

}  // namespace qsindy
