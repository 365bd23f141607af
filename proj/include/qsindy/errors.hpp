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

#include <stdexcept>
#include <string>

namespace qsindy {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Trajectory escaped the divergence guard during integration.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Smoothing window leaves too few rows after boundary trimming.
class WindowTooLargeError : public Error {
 public:
  using Error::Error;
};

/// A true-coefficient label is missing from the column labels.
class MissingLabelError : public Error {
 public:
  using Error::Error;
};

/// PDE solution blew up.
class InstabilityError : public Error {
 public:
  using Error::Error;
};

/// Design matrix condition number exceeds the solver limit.
class RankDeficiencyError : public Error {
 public:
  using Error::Error;
};

/// Input is degenerate for the requested statistic (zero variance, identical points).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Data point dimension does not match what a feature map consumes.
class ArityError : public Error {
 public:
  using Error::Error;
};

/// Model labels do not line up with the ground-truth coefficient matrix.
class LabelMismatchError : public Error {
 public:
  using Error::Error;
};

/// A machine-precision identity check exceeded its bound.
class VerificationError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration file or option.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// CSV content does not match the schema a plot expects.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace qsindy
