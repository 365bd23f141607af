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

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qsindy/linalg.hpp"
#include "qsindy/qsim.hpp"

namespace qsindy {

enum class FeatureMapKind { ZZ2, ZZ3, IQP, Reupload };

std::string_view to_string(FeatureMapKind kind);
/// Accepts "zz2", "zz3", "iqp", "reupload" (case-insensitive).
FeatureMapKind parse_feature_map(std::string_view text);

/// Frozen variational angles for the re-uploading map, indexed
/// [layer][qubit][RZ, RY, RX]. Drawn once from std::mt19937(42) with
/// std::uniform_real_distribution(-pi, pi) and pinned here.
inline constexpr std::array<double, 18> kReuploadAngles = {
    1.8632345218245812,   -1.9890378894725764, 1.7573503667502743,   //
    0.60852751223778023,  -0.34034282190211762, -2.5134317017422863,  //
    -0.25604678908583089, -1.0448396088165031, -2.2439339843666146,   //
    0.94806023925305549,  -2.7871482652081987, 1.3948594202153828,    //
    2.7555079714136745,   -3.136699530238086,  3.0926564685415308,    //
    0.73815808118384441,  0.70153750993254249, -3.0971937269486416,
};

struct FeatureMapSpec {
  FeatureMapKind kind = FeatureMapKind::ZZ2;
  int n_qubits = 2;
  /// Multiply inputs by pi / (2 max|X|) before encoding.
  bool rescale = false;
  /// Non-empty only for Reupload.
  std::vector<double> fixed_params;
  std::vector<qsim::PauliString> observables;

  /// Canonical spec for a kind. Rescaling defaults on for ZZ3 only.
  static FeatureMapSpec make(FeatureMapKind kind);
  static FeatureMapSpec make(FeatureMapKind kind, bool rescale);

  int input_arity() const { return n_qubits; }
  void validate() const;
};

/// Data-parameterized circuit for one (already rescaled) input point.
/// Throws ArityError if x has the wrong length.
qsim::Circuit build_circuit(const FeatureMapSpec& spec, std::span<const double> x);

struct QuantumFeatures {
  Matrix q;  ///< N x (number of observables)
  std::vector<std::string> column_labels;
  FeatureMapKind map_kind = FeatureMapKind::ZZ2;
  double scale = 1.0;  ///< factor applied to inputs before encoding

  /// Worst density-matrix invariant deviation seen (noisy evaluation only).
  qsim::DensityInvariants worst_invariants;
};

/// Row i holds the observables of build_circuit(spec, scale * x_i), through
/// the pure-state path when p_noise == 0 and the density path otherwise.
QuantumFeatures evaluate(const FeatureMapSpec& spec, const Matrix& x, double p_noise = 0.0);

}  // namespace qsindy
