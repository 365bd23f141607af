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

#include "qsindy/svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <tuple>

#include "qsindy/errors.hpp"

namespace qsindy {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kMargin = 60.0;
constexpr std::array<const char*, 6> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw SchemaError("non-numeric " + what + " value '" + s + "'");
  }
}

std::string fmt(double v) {
  std::ostringstream o;
  o << std::setprecision(4) << v;
  return o.str();
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Band {
  std::vector<double> x, mean, lo, hi;
};

// Line chart with y fixed to [0, 1] and one shaded min/max band per series.
std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::vector<std::pair<std::string, Band>>& series) {
  double xmin = INFINITY, xmax = -INFINITY;
  for (const auto& [name, b] : series) {
    for (double x : b.x) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
    }
  }
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  const double pw = kWidth - 2 * kMargin;
  const double ph = kHeight - 2 * kMargin;
  auto sx = [&](double x) { return kMargin + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return kHeight - kMargin - y * ph; };

  std::ostringstream s;
  s << std::fixed << std::setprecision(2);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << escape(title)
    << "</text>\n";
  s << "<line x1=\"" << kMargin << "\" y1=\"" << sy(0) << "\" x2=\"" << kWidth - kMargin << "\" y2=\"" << sy(0)
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << kMargin << "\" y1=\"" << sy(0) << "\" x2=\"" << kMargin << "\" y2=\"" << sy(1)
    << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double y = 0.25 * k;
    s << "<text x=\"" << kMargin - 8 << "\" y=\"" << sy(y) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
      << fmt(y) << "</text>\n";
    const double x = xmin + 0.25 * k * (xmax - xmin);
    s << "<text x=\"" << sx(x) << "\" y=\"" << sy(0) + 18 << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(x)
      << "</text>\n";
  }
  s << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 16 << "\" text-anchor=\"middle\" font-size=\"13\">"
    << escape(x_label) << "</text>\n";
  s << "<text x=\"18\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
    << kHeight / 2 << ")\">TPR</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& [name, b] = series[i];
    const char* color = kPalette[i % kPalette.size()];
    s << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
    for (std::size_t k = 0; k < b.x.size(); ++k) s << sx(b.x[k]) << ',' << sy(b.hi[k]) << ' ';
    for (std::size_t k = b.x.size(); k-- > 0;) s << sx(b.x[k]) << ',' << sy(b.lo[k]) << ' ';
    s << "\"/>\n<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < b.x.size(); ++k) s << sx(b.x[k]) << ',' << sy(b.mean[k]) << ' ';
    s << "\"/>\n";
    const double ly = kMargin + 16.0 * static_cast<double>(i);
    s << "<rect x=\"" << kWidth - kMargin - 110 << "\" y=\"" << ly - 9 << "\" width=\"10\" height=\"10\" fill=\""
      << color << "\"/>\n";
    s << "<text x=\"" << kWidth - kMargin - 95 << "\" y=\"" << ly << "\" font-size=\"12\">" << escape(name)
      << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

// Groups (series, x) -> y values and reduces to mean/min/max bands. Series
// keep first-appearance order; x values are sorted.
std::vector<std::pair<std::string, Band>> bands(const std::vector<std::tuple<std::string, double, double>>& points) {
  std::vector<std::string> order;
  std::map<std::string, std::map<double, std::vector<double>>> groups;
  for (const auto& [name, x, y] : points) {
    if (groups.count(name) == 0) order.push_back(name);
    groups[name][x].push_back(y);
  }
  std::vector<std::pair<std::string, Band>> out;
  for (const auto& name : order) {
    Band b;
    for (const auto& [x, ys] : groups[name]) {
      double sum = 0.0;
      for (double y : ys) sum += y;
      b.x.push_back(x);
      b.mean.push_back(sum / static_cast<double>(ys.size()));
      b.lo.push_back(*std::min_element(ys.begin(), ys.end()));
      b.hi.push_back(*std::max_element(ys.begin(), ys.end()));
    }
    out.emplace_back(name, std::move(b));
  }
  return out;
}

std::string heatmap(const CsvTable& t) {
  const auto cg = t.column("gamma_multiplier");
  const auto cl = t.column("landmarks");
  const auto cm = t.column("mean_tpr");
  std::vector<double> gammas, lands;
  std::map<std::pair<double, double>, double> value;
  for (const auto& r : t.rows) {
    const double g = to_double(r[cg], "gamma_multiplier");
    const double l = to_double(r[cl], "landmarks");
    value[{g, l}] = to_double(r[cm], "mean_tpr");
    if (std::find(gammas.begin(), gammas.end(), g) == gammas.end()) gammas.push_back(g);
    if (std::find(lands.begin(), lands.end(), l) == lands.end()) lands.push_back(l);
  }
  std::sort(gammas.begin(), gammas.end());
  std::sort(lands.begin(), lands.end());
  const double cw = (kWidth - 2 * kMargin) / static_cast<double>(lands.size());
  const double ch = (kHeight - 2 * kMargin) / static_cast<double>(gammas.size());

  std::ostringstream s;
  s << std::fixed << std::setprecision(2);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">RBF grid mean TPR</text>\n";
  for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
    for (std::size_t li = 0; li < lands.size(); ++li) {
      const auto it = value.find({gammas[gi], lands[li]});
      const double v = it == value.end() ? 0.0 : std::clamp(it->second, 0.0, 1.0);
      const int shade = static_cast<int>(std::lround(255.0 * (1.0 - v)));
      const double x = kMargin + cw * static_cast<double>(li);
      const double y = kMargin + ch * static_cast<double>(gi);
      s << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw << "\" height=\"" << ch << "\" fill=\"rgb("
        << shade << ',' << shade << ",255)\" stroke=\"white\"/>\n";
      s << "<text x=\"" << x + cw / 2 << "\" y=\"" << y + ch / 2 + 4 << "\" text-anchor=\"middle\" font-size=\"12\">"
        << (it == value.end() ? "-" : fmt(it->second)) << "</text>\n";
    }
    s << "<text x=\"" << kMargin - 6 << "\" y=\"" << kMargin + ch * (static_cast<double>(gi) + 0.5) + 4
      << "\" text-anchor=\"end\" font-size=\"11\">x" << fmt(gammas[gi]) << "</text>\n";
  }
  for (std::size_t li = 0; li < lands.size(); ++li) {
    s << "<text x=\"" << kMargin + cw * (static_cast<double>(li) + 0.5) << "\" y=\"" << kHeight - kMargin + 16
      << "\" text-anchor=\"middle\" font-size=\"11\">L=" << fmt(lands[li]) << "</text>\n";
  }
  s << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 16
    << "\" text-anchor=\"middle\" font-size=\"13\">landmarks (rows: gamma multiplier)</text>\n";
  s << "</svg>\n";
  return s.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw SchemaError("CSV has no column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot read CSV '" + path + "'");
  CsvTable t;
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw SchemaError("CSV '" + path + "' is empty");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = split(line);
    if (row.size() != t.header.size()) throw SchemaError("CSV '" + path + "' has a row of the wrong width");
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<std::string> plot_csv(const std::string& csv_path, const std::string& kind, const std::string& out_dir) {
  const CsvTable t = read_csv(csv_path);
  if (t.rows.empty()) throw SchemaError("CSV '" + csv_path + "' has no data rows");
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> written;

  if (kind == "sweep") {
    const auto cs = t.column("system");
    const auto cm = t.column("method");
    const auto cx = t.column("sigma");
    const auto cy = t.column("tpr");
    std::vector<std::string> systems;
    std::map<std::string, std::vector<std::tuple<std::string, double, double>>> points;
    for (const auto& r : t.rows) {
      if (points.count(r[cs]) == 0) systems.push_back(r[cs]);
      points[r[cs]].emplace_back(r[cm], to_double(r[cx], "sigma"), to_double(r[cy], "tpr"));
    }
    for (const auto& sys : systems) {
      const auto path = std::filesystem::path(out_dir) / ("sweep_" + sys + ".svg");
      write_file(path, line_chart(sys, "noise level sigma", bands(points[sys])));
      written.push_back(path.string());
    }
  } else if (kind == "hw-noise") {
    const auto cm = t.column("method");
    const auto cx = t.column("p");
    const auto cy = t.column("tpr");
    std::vector<std::tuple<std::string, double, double>> points;
    for (const auto& r : t.rows) points.emplace_back(r[cm], to_double(r[cx], "p"), to_double(r[cy], "tpr"));
    const auto path = std::filesystem::path(out_dir) / "hw_noise.svg";
    write_file(path, line_chart("Depolarizing noise", "depolarizing p", bands(points)));
    written.push_back(path.string());
  } else if (kind == "rbf-grid") {
    const auto path = std::filesystem::path(out_dir) / "rbf_grid.svg";
    write_file(path, heatmap(t));
    written.push_back(path.string());
  } else {
    throw SchemaError("unknown plot kind '" + kind + "' (expected sweep, rbf-grid or hw-noise)");
  }
  return written;
}

}  // namespace qsindy
