// Copyright 2026 The privcam Authors.
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

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "privcam/baselines.hpp"
#include "privcam/coordination.hpp"
#include "privcam/plangen.hpp"
#include "privcam/scenario.hpp"

namespace privcam {

// Sum of the chosen plans as a sparse vector. Throws std::domain_error if
// a choice does not name an existing plan.
SparseVector aggregate(std::span<const PlanSet> plan_sets, std::span<const std::size_t> choices);

// Area rates. Every cell has the same area, so area weights cancel;
// coverage is capped at one cell per cell.
//   privacy_violation_rate: sum_{n in P} min(G_n, 1) / |P|, 0 if P is empty
//   total_coverage_ratio:   same over cells outside P with T_n = 1
double privacy_violation_rate(const Aggregate& g, const GridMap& map);
double total_coverage_ratio(const Aggregate& g, const GridMap& map, const TargetVector& target);
// Uncapped counterparts (may exceed 1).
double privacy_mass_ratio(const Aggregate& g, const GridMap& map);
double coverage_mass_ratio(const Aggregate& g, const GridMap& map, const TargetVector& target);

// Fraction of `total_cameras` whose selected plan touches a private cell.
// Idle cameras count in the denominator only.
double cameras_violation_rate(std::span<const PlanSet> plan_sets,
                              std::span<const std::size_t> choices, const GridMap& map,
                              std::size_t total_cameras);

inline constexpr double kStandardAngleDeg = 45.0;

// mean_price * required_angle / standard_angle. Throws std::domain_error
// unless every input is positive.
double interpolated_cost(double mean_price, double required_angle_deg,
                         double standard_angle_deg = kStandardAngleDeg);

enum class CellLabel { kLoss, kMatch, kOverlap };
std::string_view to_string(CellLabel label);

inline constexpr double kMatchTolerance = 1e-6;

struct HeatmapCell {
  CellLabel label = CellLabel::kMatch;
  double magnitude = 0;  // G_n - T_n
};

// Throws std::domain_error on a length mismatch.
std::vector<HeatmapCell> overlap_loss_heatmap(std::span<const double> g,
                                              const TargetVector& target);

struct Heatmap {
  int rows = 0;
  int cols = 0;
  std::vector<double> target;
  std::vector<double> aggregate;
  std::vector<HeatmapCell> cells;
};

Heatmap make_heatmap(const Aggregate& g, const TargetVector& target, const GridMap& map);

// CSV: cell_index,row,col,target,aggregate,label,magnitude
inline constexpr std::string_view kHeatmapCsvHeader =
    "cell_index,row,col,target,aggregate,label,magnitude";
std::string heatmap_csv(const Heatmap& h);
// Throws std::runtime_error with a line number on malformed input.
Heatmap parse_heatmap_csv(std::istream& in);

// Grayscale P2 image, one pixel per cell, row 0 first. Bands:
// loss 0..96 (darker = larger deficit), match 128, overlap 160..255
// (brighter = larger excess).
inline constexpr int kMatchGray = 128;
std::string heatmap_pgm(const Heatmap& h);

struct MetricsReport {
  std::string scenario;
  std::string method;
  std::string placement;
  int plan_count = 0;
  double coverage_inefficiency = 0;
  double privacy_violation_rate = 0;
  double total_coverage_ratio = 0;
  double cameras_violation_rate = 0;
  double interpolated_total_cost = 0;
  // Diagnostics, not part of the CSV.
  double privacy_mass_ratio = 0;
  double coverage_mass_ratio = 0;
  std::size_t idle_cameras = 0;
};

struct CostModel {
  double mean_price = 1.0;
  double standard_angle_deg = kStandardAngleDeg;
};

// Metrics of a selection over the operating cameras' plan sets; the
// camera total and angle come from the scenario.
MetricsReport evaluate(const Scenario& scenario, std::span<const PlanSet> plan_sets,
                       std::span<const std::size_t> choices, const Aggregate& g,
                       std::string method, const CostModel& cost = {});

inline constexpr std::string_view kMetricsCsvHeader =
    "scenario,method,placement,K,inefficiency,privacy_violation,coverage_ratio,camera_violation,"
    "interp_cost";
std::string metrics_csv_row(const MetricsReport& m);

}  // namespace privcam
