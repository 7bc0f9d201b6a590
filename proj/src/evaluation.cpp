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

#include "privcam/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>
#include <tuple>

namespace privcam {

namespace {

std::string exact(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

void check_length(const Aggregate& g, const GridMap& map) {
  if (g.units.size() != map.cell_count()) {
    throw std::domain_error("aggregate length does not match the map");
  }
}

// (capped, uncapped) unit sums over cells accepted by `in_set`, with the
// set size.
template <typename Pred>
std::tuple<Units, Units, std::size_t> masked_sums(const Aggregate& g, Pred in_set) {
  Units capped = 0, raw = 0;
  std::size_t count = 0;
  for (std::size_t n = 0; n < g.units.size(); ++n) {
    if (!in_set(n)) continue;
    ++count;
    raw += g.units[n];
    capped += std::min<Units>(g.units[n], g.units_per_cell);
  }
  return {capped, raw, count};
}

double ratio(Units units, std::size_t cells, int q) {
  if (cells == 0) return 0.0;
  return static_cast<double>(units) / (static_cast<double>(cells) * q);
}

}  // namespace

SparseVector aggregate(std::span<const PlanSet> plan_sets, std::span<const std::size_t> choices) {
  if (choices.size() != plan_sets.size()) {
    throw std::domain_error("one choice per plan set is required");
  }
  SparseVector g;
  for (std::size_t i = 0; i < plan_sets.size(); ++i) {
    if (choices[i] >= plan_sets[i].plans.size()) {
      throw std::domain_error("camera " + std::to_string(plan_sets[i].camera_id) +
                              " has no plan " + std::to_string(choices[i]));
    }
    g += plan_sets[i].plans[choices[i]].entries;
  }
  return g;
}

double privacy_violation_rate(const Aggregate& g, const GridMap& map) {
  check_length(g, map);
  const auto [capped, raw, count] = masked_sums(g, [&](std::size_t n) { return map.is_private(n); });
  return ratio(capped, count, g.units_per_cell);
}

double privacy_mass_ratio(const Aggregate& g, const GridMap& map) {
  check_length(g, map);
  const auto [capped, raw, count] = masked_sums(g, [&](std::size_t n) { return map.is_private(n); });
  return ratio(raw, count, g.units_per_cell);
}

double total_coverage_ratio(const Aggregate& g, const GridMap& map, const TargetVector& target) {
  check_length(g, map);
  const auto [capped, raw, count] = masked_sums(
      g, [&](std::size_t n) { return !map.is_private(n) && target[n] == 1; });
  return ratio(capped, count, g.units_per_cell);
}

double coverage_mass_ratio(const Aggregate& g, const GridMap& map, const TargetVector& target) {
  check_length(g, map);
  const auto [capped, raw, count] = masked_sums(
      g, [&](std::size_t n) { return !map.is_private(n) && target[n] == 1; });
  return ratio(raw, count, g.units_per_cell);
}

double cameras_violation_rate(std::span<const PlanSet> plan_sets,
                              std::span<const std::size_t> choices, const GridMap& map,
                              std::size_t total_cameras) {
  if (choices.size() != plan_sets.size()) {
    throw std::domain_error("one choice per plan set is required");
  }
  if (total_cameras < plan_sets.size()) {
    throw std::domain_error("camera total is smaller than the number of plan sets");
  }
  if (total_cameras == 0) return 0.0;
  std::size_t violating = 0;
  for (std::size_t i = 0; i < plan_sets.size(); ++i) {
    const auto& entries = plan_sets[i].plans.at(choices[i]).entries;
    const bool hit = std::any_of(entries.begin(), entries.end(),
                                 [&](const SparseEntry& e) { return map.is_private(e.cell); });
    violating += hit;
  }
  return static_cast<double>(violating) / static_cast<double>(total_cameras);
}

double interpolated_cost(double mean_price, double required_angle_deg,
                         double standard_angle_deg) {
  if (!(mean_price > 0.0) || !(required_angle_deg > 0.0) || !(standard_angle_deg > 0.0)) {
    throw std::domain_error("interpolated cost inputs must be positive");
  }
  return mean_price * required_angle_deg / standard_angle_deg;
}

std::string_view to_string(CellLabel label) {
  switch (label) {
    case CellLabel::kLoss:
      return "loss";
    case CellLabel::kOverlap:
      return "overlap";
    case CellLabel::kMatch:
      break;
  }
  return "match";
}

std::vector<HeatmapCell> overlap_loss_heatmap(std::span<const double> g,
                                              const TargetVector& target) {
  if (g.size() != target.size()) {
    throw std::domain_error("heatmap: aggregate and target lengths differ");
  }
  std::vector<HeatmapCell> out(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double d = g[n] - target[n];
    out[n].magnitude = d;
    out[n].label = d > kMatchTolerance    ? CellLabel::kOverlap
                   : -d > kMatchTolerance ? CellLabel::kLoss
                                          : CellLabel::kMatch;
  }
  return out;
}

Heatmap make_heatmap(const Aggregate& g, const TargetVector& target, const GridMap& map) {
  check_length(g, map);
  Heatmap h;
  h.rows = map.rows();
  h.cols = map.cols();
  h.aggregate = g.values();
  h.target.assign(target.values.begin(), target.values.end());
  h.cells = overlap_loss_heatmap(h.aggregate, target);
  return h;
}

std::string heatmap_csv(const Heatmap& h) {
  std::ostringstream out;
  out << kHeatmapCsvHeader << '\n';
  for (std::size_t n = 0; n < h.cells.size(); ++n) {
    out << n << ',' << n / h.cols << ',' << n % h.cols << ',' << exact(h.target[n]) << ','
        << exact(h.aggregate[n]) << ',' << to_string(h.cells[n].label) << ','
        << exact(h.cells[n].magnitude) << '\n';
  }
  return out.str();
}

Heatmap parse_heatmap_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  auto fail = [&](const std::string& why) -> void {
    throw std::runtime_error("heatmap CSV line " + std::to_string(line_no) + ": " + why);
  };
  if (!std::getline(in, line)) fail("missing header");
  if (line != kHeatmapCsvHeader) fail("unexpected header '" + line + "'");

  Heatmap h;
  std::vector<std::pair<int, int>> coords;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream row(line);
    for (std::string field; std::getline(row, field, ',');) f.push_back(field);
    if (f.size() != 7) fail("expected 7 fields");
    std::size_t index = 0;
    int r = 0, c = 0;
    double t = 0, g = 0, mag = 0;
    try {
      std::size_t used = 0;
      auto whole = [&](const std::string& s) {
        if (used != s.size()) fail("malformed number '" + s + "'");
      };
      index = std::stoull(f[0], &used), whole(f[0]);
      r = std::stoi(f[1], &used), whole(f[1]);
      c = std::stoi(f[2], &used), whole(f[2]);
      t = std::stod(f[3], &used), whole(f[3]);
      g = std::stod(f[4], &used), whole(f[4]);
      mag = std::stod(f[6], &used), whole(f[6]);
    } catch (const std::logic_error&) {
      fail("non-numeric field");
    }
    if (index != h.cells.size()) fail("cell indices must be consecutive from 0");
    if (r < 0 || c < 0) fail("negative row or column");
    HeatmapCell cell;
    cell.magnitude = mag;
    if (f[5] == "loss") {
      cell.label = CellLabel::kLoss;
    } else if (f[5] == "match") {
      cell.label = CellLabel::kMatch;
    } else if (f[5] == "overlap") {
      cell.label = CellLabel::kOverlap;
    } else {
      fail("unknown label '" + f[5] + "'");
    }
    h.cells.push_back(cell);
    h.target.push_back(t);
    h.aggregate.push_back(g);
    coords.emplace_back(r, c);
    h.rows = std::max(h.rows, r + 1);
    h.cols = std::max(h.cols, c + 1);
  }
  if (h.cells.empty()) fail("no cells");
  if (static_cast<std::size_t>(h.rows) * h.cols != h.cells.size()) {
    fail("cells do not form a complete grid");
  }
  for (std::size_t n = 0; n < coords.size(); ++n) {
    if (coords[n] != std::pair<int, int>(n / h.cols, n % h.cols)) {
      line_no = n + 2;
      fail("row/col disagree with cell_index");
    }
  }
  return h;
}

std::string heatmap_pgm(const Heatmap& h) {
  std::ostringstream out;
  out << "P2\n" << h.cols << ' ' << h.rows << "\n255\n";
  for (int r = 0; r < h.rows; ++r) {
    for (int c = 0; c < h.cols; ++c) {
      const HeatmapCell& cell = h.cells[static_cast<std::size_t>(r) * h.cols + c];
      const double mag = std::min(std::abs(cell.magnitude), 1.0);
      long v = kMatchGray;
      if (cell.label == CellLabel::kLoss) v = std::lround(96.0 * (1.0 - mag));
      if (cell.label == CellLabel::kOverlap) v = 160 + std::lround(95.0 * mag);
      out << (c ? " " : "") << v;
    }
    out << '\n';
  }
  return out.str();
}

MetricsReport evaluate(const Scenario& scenario, std::span<const PlanSet> plan_sets,
                       std::span<const std::size_t> choices, const Aggregate& g,
                       std::string method, const CostModel& cost) {
  MetricsReport m;
  m.scenario = scenario.label;
  m.method = std::move(method);
  m.placement = scenario.config.placement ? scenario.config.placement->label()
                                          : std::to_string(scenario.camera_count()) + "cams";
  m.plan_count = scenario.plan_count;
  m.coverage_inefficiency = rmse_cost(g, scenario.target);
  m.privacy_violation_rate = privacy_violation_rate(g, scenario.map);
  m.total_coverage_ratio = total_coverage_ratio(g, scenario.map, scenario.target);
  m.cameras_violation_rate =
      cameras_violation_rate(plan_sets, choices, scenario.map, scenario.camera_count());
  if (!scenario.cameras.empty()) {
    m.interpolated_total_cost =
        interpolated_cost(cost.mean_price, scenario.cameras.front().horizontal_angle_deg(),
                          cost.standard_angle_deg) *
        static_cast<double>(scenario.camera_count());
  }
  m.privacy_mass_ratio = privacy_mass_ratio(g, scenario.map);
  m.coverage_mass_ratio = coverage_mass_ratio(g, scenario.map, scenario.target);
  m.idle_cameras = scenario.camera_count() - plan_sets.size();
  return m;
}

std::string metrics_csv_row(const MetricsReport& m) {
  return m.scenario + ',' + m.method + ',' + m.placement + ',' + std::to_string(m.plan_count) +
         ',' + fixed6(m.coverage_inefficiency) + ',' + fixed6(m.privacy_violation_rate) + ',' +
         fixed6(m.total_coverage_ratio) + ',' + fixed6(m.cameras_violation_rate) + ',' +
         fixed6(m.interpolated_total_cost);
}

}  // namespace privcam
