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

#include <string>
#include <vector>

namespace qsindy {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws SchemaError when absent.
  std::size_t column(const std::string& name) const;
};

/// Plain comma-separated file with a header row. Throws SchemaError if the
/// file has no header or a row has the wrong width.
CsvTable read_csv(const std::string& path);

/// Renders a result CSV as static SVG into `out_dir` and returns the files
/// written. `kind` is "sweep" (one TPR-vs-sigma chart per system, mean with
/// min/max band per method), "rbf-grid" (heatmap) or "hw-noise" (TPR vs p).
/// Throws SchemaError if the CSV does not carry the columns the kind needs
/// or has no data rows.
std::vector<std::string> plot_csv(const std::string& csv_path, const std::string& kind, const std::string& out_dir);

}  // namespace qsindy
