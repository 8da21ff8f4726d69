// Copyright 2026 The steerbench Authors
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

#include "steerbench/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "steerbench/errors.hpp"

namespace steer {
namespace {

constexpr double kWidth = 720, kHeight = 450;
constexpr double kLeft = 80, kRight = 190, kTop = 40, kBottom = 60;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::pair<double, double> padded_range(double lo, double hi) {
  if (hi <= lo) {
    const double d = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
    return {lo - d, hi + d};
  }
  const double d = (hi - lo) * 0.05;
  return {lo - d, hi + d};
}

std::string format_eps(double eps) {
  std::ostringstream s;
  s << eps;
  return s.str();
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
  if (spec.series.empty()) throw StructuralError("plot: no series");
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : spec.series) {
    if (s.x.empty()) throw StructuralError("plot: series '" + s.label + "' is empty");
    if (s.x.size() != s.y.size()) throw StructuralError("plot: series '" + s.label + "' has mismatched x/y lengths");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
        throw StructuralError("plot: series '" + s.label + "' has a non-finite value at point " + std::to_string(i + 1));
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  std::tie(xmin, xmax) = padded_range(xmin, xmax);
  std::tie(ymin, ymax) = padded_range(ymin, ymax);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return kTop + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(spec.title) << "</text>\n";
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 5.0, yv = ymin + (ymax - ymin) * i / 5.0;
    o << "<line x1=\"" << num(px(xv)) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(px(xv)) << "\" y2=\""
      << num(kTop + ph + 5) << "\" stroke=\"black\"/>";
    o << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(kTop + ph + 18) << "\" text-anchor=\"middle\">" << tick(xv)
      << "</text>\n";
    o << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(py(yv)) << "\" x2=\"" << num(kLeft) << "\" y2=\""
      << num(py(yv)) << "\" stroke=\"black\"/>";
    o << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">" << tick(yv)
      << "</text>\n";
  }
  o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 15) << "\" text-anchor=\"middle\">"
    << escape(spec.x_label) << "</text>\n";
  o << "<text transform=\"translate(18," << num(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(spec.y_label) << "</text>\n";

  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const auto& s = spec.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    if (!spec.markers_only && s.x.size() > 1) {
      o << "<polyline class=\"series\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) o << (i ? " " : "") << num(px(s.x[i])) << ',' << num(py(s.y[i]));
      o << "\"/>\n";
    }
    for (std::size_t i = 0; i < s.x.size(); ++i)
      o << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i])) << "\" r=\"3\" fill=\"" << color
        << "\"/>";
    o << '\n';
    const double ly = kTop + 10 + 20.0 * static_cast<double>(k);
    o << "<g class=\"legend-entry\"><line x1=\"" << num(kWidth - kRight + 15) << "\" y1=\"" << num(ly) << "\" x2=\""
      << num(kWidth - kRight + 40) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"/><text x=\"" << num(kWidth - kRight + 46) << "\" y=\"" << num(ly + 4) << "\">"
      << escape(s.label) << "</text></g>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_svg(const PlotSpec& spec, const std::filesystem::path& path) {
  const std::string svg = render_svg(spec);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + path.string());
  out << svg;
}

PlotSpec curves_plot(const std::vector<std::pair<std::string, std::filesystem::path>>& curves,
                     const std::string& title) {
  PlotSpec spec{title, "Epoch", "MSE", {}, false};
  for (const auto& [label, path] : curves) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open curve " + path.string());
    Series s{label, {}, {}};
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
      ++row;
      if (line.empty() || (row == 1 && line.rfind("epoch", 0) == 0)) continue;
      std::stringstream ss(line);
      std::string e, t, v;
      std::getline(ss, e, ',');
      std::getline(ss, t, ',');
      std::getline(ss, v, ',');
      double epoch = 0, val = 0;
      try {
        epoch = std::stod(e);
        val = std::stod(v);
      } catch (const std::exception&) {
        throw StructuralError(path.string() + ": row " + std::to_string(row) + " is malformed");
      }
      if (!std::isfinite(epoch) || !std::isfinite(val))
        throw StructuralError(path.string() + ": row " + std::to_string(row) + " has a non-finite value");
      s.x.push_back(epoch);
      s.y.push_back(val);
    }
    if (s.x.empty()) throw StructuralError("plot: curve " + path.string() + " has no rows");
    spec.series.push_back(std::move(s));
  }
  return spec;
}

void plot_curves(const std::vector<std::pair<std::string, std::filesystem::path>>& curves,
                 const std::filesystem::path& out, const std::string& title) {
  write_svg(curves_plot(curves, title), out);
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + path.string());
  out << "model,params,val_mse\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g", r.val_mse);
    out << r.model << ',' << r.params << ',' << buf << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  std::vector<SweepRow> rows;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || (row == 1 && line.rfind("model,", 0) == 0)) continue;
    std::stringstream ss(line);
    std::string m, p, v;
    std::getline(ss, m, ',');
    std::getline(ss, p, ',');
    std::getline(ss, v, ',');
    try {
      rows.push_back({m, std::stoll(p), std::stod(v)});
    } catch (const std::exception&) {
      throw LoadError(path.string() + ":" + std::to_string(row) + ": malformed sweep row");
    }
  }
  return rows;
}

PlotSpec sweep_plot(const std::vector<std::pair<std::string, std::vector<SweepRow>>>& families) {
  PlotSpec spec{"MSE vs number of parameters", "No. of parameters (millions)", "Validation MSE", {}, false};
  for (const auto& [label, rows] : families) {
    Series s{label, {}, {}};
    for (const auto& r : rows) {
      s.x.push_back(static_cast<double>(r.params) / 1e6);
      s.y.push_back(r.val_mse);
    }
    spec.series.push_back(std::move(s));
  }
  return spec;
}

ComparisonTable comparison_table(const RobustnessReport& report, const std::string& baseline,
                                 const std::string& attention) {
  using Key = std::pair<std::string, double>;
  std::vector<Key> order;
  std::map<Key, double> without, with;
  for (const auto& r : report.rows) {
    if (r.model != baseline && r.model != attention) continue;
    const Key k{r.attack, r.epsilon};
    if (std::find(order.begin(), order.end(), k) == order.end()) order.push_back(k);
    (r.model == baseline ? without : with)[k] = r.attacked_mse;
  }
  if (order.empty()) throw StructuralError("render_table: report has no rows for '" + baseline + "' or '" + attention + "'");
  ComparisonTable t;
  for (const auto& k : order) {
    std::string col = k.first;
    std::transform(col.begin(), col.end(), col.begin(), [](unsigned char c) { return std::toupper(c); });
    col += " eps=" + format_eps(k.second);
    if (!without.count(k)) throw StructuralError("render_table: missing '" + baseline + "' cell for " + col);
    if (!with.count(k)) throw StructuralError("render_table: missing '" + attention + "' cell for " + col);
    t.columns.push_back(col);
    t.without.push_back(without[k]);
    t.with.push_back(with[k]);
    t.change.push_back(robustness_change(without[k], with[k]));
  }
  return t;
}

std::string render_table(const ComparisonTable& t) {
  const std::size_t n = t.columns.size();
  if (t.without.size() != n || t.with.size() != n || t.change.size() != n)
    throw StructuralError("render_table: ragged table");
  std::vector<std::vector<std::string>> cells(4);
  cells[0].push_back("");
  cells[1].push_back("w/o attention");
  cells[2].push_back("w attention");
  cells[3].push_back("change");
  char buf[64];
  for (std::size_t j = 0; j < n; ++j) {
    cells[0].push_back(t.columns[j]);
    std::snprintf(buf, sizeof(buf), "%.6g", t.without[j]);
    cells[1].push_back(buf);
    std::snprintf(buf, sizeof(buf), "%.6g", t.with[j]);
    cells[2].push_back(buf);
    std::snprintf(buf, sizeof(buf), "%.2f%%", t.change[j]);
    cells[3].push_back(buf);
  }
  std::vector<std::size_t> width(n + 1, 0);
  for (const auto& row : cells)
    for (std::size_t j = 0; j < row.size(); ++j) width[j] = std::max(width[j], row[j].size());
  std::ostringstream o;
  for (const auto& row : cells) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j == 0)
        o << std::left << std::setw(static_cast<int>(width[j])) << row[j];
      else
        o << " | " << std::right << std::setw(static_cast<int>(width[j])) << row[j];
    }
    o << '\n';
  }
  return o.str();
}

std::string render_table(const RobustnessReport& report, const std::string& baseline, const std::string& attention) {
  return render_table(comparison_table(report, baseline, attention));
}

}  // namespace steer
