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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "steerbench/attacks.hpp"

namespace steer {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  bool markers_only = false;
};

/// Deterministic SVG line plot with one legend entry per series. Throws
/// StructuralError for no series, an empty series, mismatched lengths or
/// non-finite values.
std::string render_svg(const PlotSpec& spec);
void write_svg(const PlotSpec& spec, const std::filesystem::path& path);

/// Validation-MSE-vs-epoch plot from curve CSVs (label, path). A non-finite
/// value is rejected with its file and row number.
PlotSpec curves_plot(const std::vector<std::pair<std::string, std::filesystem::path>>& curves,
                     const std::string& title = "Validation MSE");
void plot_curves(const std::vector<std::pair<std::string, std::filesystem::path>>& curves,
                 const std::filesystem::path& out, const std::string& title = "Validation MSE");

struct SweepRow {
  std::string model;
  std::int64_t params = 0;
  double val_mse = 0.0;
};

/// model,params,val_mse
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);
std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path);
/// MSE against parameter count in millions, one series per label prefix group.
PlotSpec sweep_plot(const std::vector<std::pair<std::string, std::vector<SweepRow>>>& families);

/// w/o attention, w attention and change rows over (attack, eps) columns.
struct ComparisonTable {
  std::vector<std::string> columns;
  std::vector<double> without;
  std::vector<double> with;
  std::vector<double> change;
};

/// Pairs `baseline` and `attention` rows of `report` by (attack, eps) in order
/// of first appearance. Rows of any other model (e.g. a stale "change" row) are
/// ignored; change is always recomputed. A missing cell is a StructuralError.
ComparisonTable comparison_table(const RobustnessReport& report, const std::string& baseline,
                                 const std::string& attention);
std::string render_table(const ComparisonTable& table);
std::string render_table(const RobustnessReport& report, const std::string& baseline, const std::string& attention);

}  // namespace steer
