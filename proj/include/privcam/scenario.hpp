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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "privcam/geometry.hpp"

namespace privcam {

// Axis-aligned rectangle in cell coordinates.
struct PrivateRegion {
  int row = 0;
  int col = 0;
  int rows = 0;
  int cols = 0;

  bool contains(int r, int c) const {
    return r >= row && r < row + rows && c >= col && c < col + cols;
  }
  std::size_t cell_count() const { return static_cast<std::size_t>(rows) * cols; }
  bool operator==(const PrivateRegion&) const = default;
};

// Required coverage per cell: 1 = cover once, 0 = must not be covered.
struct TargetVector {
  std::vector<std::uint8_t> values;

  std::size_t size() const { return values.size(); }
  std::uint8_t operator[](std::size_t n) const { return values[n]; }
  std::size_t required_count() const;
  bool operator==(const TargetVector&) const = default;
};

struct Placement {
  int rows = 1;
  int cols = 1;

  std::size_t count() const { return static_cast<std::size_t>(rows) * cols; }
  std::string label() const;
  bool operator==(const Placement&) const = default;
};

// Parses "RxC"; throws std::invalid_argument otherwise.
Placement parse_placement(std::string_view text);

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Marks every cell of every region private in `map` (clearing previous
// marks) and returns the target: 0 on private and obstacle cells, 1
// elsewhere. Throws std::domain_error for regions outside the grid.
TargetVector build_target(GridMap& map, std::span<const PrivateRegion> regions);

// Camera locations on an evenly spaced lattice, row-major:
// ((j + 0.5) * width / cols, (i + 0.5) * height / rows).
std::vector<Vec2> grid_placement(int rows, int cols, const GridMap& map);

// Built-in private-region layouts, scaled to a grid of the given size:
//   open      no private regions
//   squares4  four squares (20% of each side) centred in the 2x2 quadrants
//   lanes2    two full-height lanes (15% of the width) centred at 1/3, 2/3
//   squares9  nine squares (20% of each side) centred in the 3x3 partition
std::vector<PrivateRegion> fixture_regions(std::string_view fixture, int grid_rows,
                                           int grid_cols);
std::span<const std::string_view> fixture_names();

// Serializable scenario description, mirroring the JSON config document.
struct ScenarioConfig {
  std::string label = "scenario";

  double width_m = 400.0;
  double height_m = 400.0;
  double cell_m = 10.0;
  std::vector<PrivateRegion> obstacles;

  std::optional<Placement> placement = Placement{4, 4};
  std::vector<Vec2> locations;  // used when placement is empty
  double sensor_w_m = 0.035;
  double focal_m = 0.031;
  std::optional<double> range_m;    // default: zero-overlap ideal
  std::optional<double> angle_deg;  // default: derived from sensor/focal

  std::optional<std::string> fixture;
  std::vector<PrivateRegion> rectangles;
  std::optional<double> threshold_v;  // default: 0.05 * F / A_n

  int plan_count = 90;
  int sample_density = kDefaultSampleDensity;

  bool operator==(const ScenarioConfig&) const = default;
};

struct Scenario {
  ScenarioConfig config;
  std::string label;
  GridMap map;
  std::vector<CameraSpec> cameras;
  TargetVector target;
  std::vector<PrivateRegion> private_regions;  // fixture + explicit rectangles
  int plan_count = 1;
  double privacy_threshold = 0.0;
  int sample_density = kDefaultSampleDensity;

  std::size_t camera_count() const { return cameras.size(); }
  int units_per_cell() const { return sample_density * sample_density; }
  bool operator==(const Scenario&) const = default;
};

// Range at which U cameras of the given half-angle tangent tile `area`
// without overlap: sqrt(area / (U tan(alpha/2))).
double default_range(double area, std::size_t camera_count, double half_angle_tan);
// 0.05 * F / A_n for the first camera of the scenario.
double default_threshold(const std::vector<CameraSpec>& cameras, const GridMap& map);

// Validates the config and expands it. Throws ScenarioError naming the
// offending field.
Scenario build_scenario(const ScenarioConfig& config);

// JSON (UTF-8) config document <-> config/scenario.
ScenarioConfig parse_scenario_config(std::string_view json_text);
Scenario load_scenario(std::string_view json_text);
Scenario load_scenario_file(const std::filesystem::path& path);
std::string serialize_scenario(const Scenario& scenario);
std::string serialize_config(const ScenarioConfig& config);

// Desk-scale defaults: 400 m x 400 m map of 10 m cells, 45 degree cameras.
ScenarioConfig desk_config(std::string_view fixture = "open",
                           Placement placement = {4, 4}, int plan_count = 90);

}  // namespace privcam
