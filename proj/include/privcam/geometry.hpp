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

// Deterministic 2D camera coverage model.
//
// The world is a rectangle [0, width] x [0, height] in meters, split into
// square cells stored row-major: row r spans y in [r*cell, (r+1)*cell) and
// column c spans x in [c*cell, (c+1)*cell). Orientations are in degrees,
// counterclockwise from the +X axis.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "privcam/sparse.hpp"

namespace privcam {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Vec2&) const = default;
};

struct CellCoord {
  int row = 0;
  int col = 0;

  bool operator==(const CellCoord&) const = default;
};

struct CameraSpec {
  std::size_t id = 0;
  Vec2 location;
  double sensor_width = 0.0;  // w_I, meters
  double focal_length = 0.0;  // f, meters
  double range = 0.0;         // effective range x, meters
  // Horizontal angle in degrees; when set it takes precedence over the
  // sensor/focal-length derivation.
  std::optional<double> angle_override;

  bool operator==(const CameraSpec&) const = default;

  // Horizontal angle actually used for the field of view, in degrees.
  double horizontal_angle_deg() const;
  // tan(alpha / 2) of the field of view.
  double half_angle_tan() const;
};

class GridMap {
 public:
  GridMap() = default;
  // Throws std::domain_error unless width and height are positive integer
  // multiples of cell_size.
  GridMap(double width, double height, double cell_size);

  double width() const { return width_; }
  double height() const { return height_; }
  double cell_size() const { return cell_size_; }
  double cell_area() const { return cell_size_ * cell_size_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t cell_count() const { return static_cast<std::size_t>(rows_) * cols_; }

  CellIndex index(int row, int col) const {
    return static_cast<CellIndex>(row * cols_ + col);
  }
  CellIndex index(CellCoord c) const { return index(c.row, c.col); }
  CellCoord coord(CellIndex n) const {
    return {static_cast<int>(n) / cols_, static_cast<int>(n) % cols_};
  }
  bool in_grid(int row, int col) const {
    return row >= 0 && row < rows_ && col >= 0 && col < cols_;
  }

  bool contains(Vec2 p) const {
    return p.x >= 0.0 && p.x <= width_ && p.y >= 0.0 && p.y <= height_;
  }
  // Cell holding a point; the far map edges belong to the last row/column.
  // Throws std::domain_error for points outside the map.
  CellCoord cell_of(Vec2 p) const;
  Vec2 cell_center(CellIndex n) const;

  bool is_obstacle(CellIndex n) const { return obstacles_[n] != 0; }
  bool is_private(CellIndex n) const { return private_[n] != 0; }
  void set_obstacle(CellIndex n, bool value = true) { obstacles_[n] = value; }
  void set_private(CellIndex n, bool value = true) { private_[n] = value; }
  void clear_private();
  bool has_obstacles() const { return obstacle_count_() > 0; }
  std::size_t private_count() const;

  const std::vector<std::uint8_t>& obstacle_mask() const { return obstacles_; }
  const std::vector<std::uint8_t>& private_mask() const { return private_; }

  bool operator==(const GridMap&) const = default;

 private:
  std::size_t obstacle_count_() const;

  double width_ = 0.0;
  double height_ = 0.0;
  double cell_size_ = 1.0;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::uint8_t> obstacles_;
  std::vector<std::uint8_t> private_;
};

struct FovTriangle {
  Vec2 apex;
  Vec2 left;   // rotated image of (x, +y)
  Vec2 right;  // rotated image of (x, -y)

  double area() const;
  // Closed containment test: points on an edge count as inside.
  bool contains(Vec2 p) const;
};

// Throws std::domain_error when the spec breaks its invariants, or when
// `map` is given and the camera lies outside it.
void validate(const CameraSpec& spec, const GridMap* map = nullptr);

// 2 atan(w_I / 2f), in degrees.
double horizontal_angle(double sensor_width, double focal_length);
// x^2 w_I / 2f, in square meters.
double fov_area(double range, double sensor_width, double focal_length);
// Area of the camera's field-of-view triangle, honouring angle_override.
double fov_area(const CameraSpec& spec);

// Unit vector for an orientation. Multiples of 90 degrees are exact.
Vec2 direction(double orientation_deg);

FovTriangle fov_triangle(const CameraSpec& spec, double orientation_deg);

// Cells on the Bresenham line between two cells, both endpoints included.
std::vector<CellCoord> bresenham_cells(CellCoord from, CellCoord to);

// True iff no cell after the source cell on the Bresenham line from the
// cell of `from` to the cell of `to` is an obstacle. The destination cell
// is checked; the source cell is not.
bool point_visible(Vec2 from, Vec2 to, const GridMap& map);

inline constexpr int kDefaultSampleDensity = 4;

// Number of the s*s sample points of a cell that fall inside the camera's
// field of view and are visible from the camera.
int covered_samples(const CameraSpec& spec, double orientation_deg,
                    CellIndex cell, const GridMap& map,
                    int sample_density = kDefaultSampleDensity);

double coverage_ratio(const CameraSpec& spec, double orientation_deg,
                      CellIndex cell, const GridMap& map,
                      int sample_density = kDefaultSampleDensity);

// Sparse per-cell covered-sample counts (units of 1/s^2 of a cell) over
// the cells intersecting the triangle's bounding box.
SparseVector coverage_vector(const CameraSpec& spec, double orientation_deg,
                             const GridMap& map,
                             int sample_density = kDefaultSampleDensity);

}  // namespace privcam
