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

#include "privcam/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace privcam {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double cross(Vec2 o, Vec2 a, Vec2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool is_integer_multiple(double value, double unit) {
  const double q = value / unit;
  return std::abs(q - std::round(q)) <= 1e-9 * std::max(1.0, std::abs(q));
}

// Precomputed closed-triangle test. The slack absorbs rounding in vertex
// construction so that points on an edge are counted consistently.
class TriangleTester {
 public:
  explicit TriangleTester(const FovTriangle& t) : a_(t.apex), b_(t.left), c_(t.right) {
    const auto sq = [](Vec2 p, Vec2 q) {
      return (p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y);
    };
    const double longest = std::max({sq(a_, b_), sq(b_, c_), sq(c_, a_)});
    tol_ = 1e-10 * longest;
    min_x_ = std::min({a_.x, b_.x, c_.x});
    max_x_ = std::max({a_.x, b_.x, c_.x});
    min_y_ = std::min({a_.y, b_.y, c_.y});
    max_y_ = std::max({a_.y, b_.y, c_.y});
  }

  bool contains(Vec2 p) const {
    const double d1 = cross(a_, b_, p);
    const double d2 = cross(b_, c_, p);
    const double d3 = cross(c_, a_, p);
    const bool has_neg = d1 < -tol_ || d2 < -tol_ || d3 < -tol_;
    const bool has_pos = d1 > tol_ || d2 > tol_ || d3 > tol_;
    return !(has_neg && has_pos);
  }

  double min_x() const { return min_x_; }
  double max_x() const { return max_x_; }
  double min_y() const { return min_y_; }
  double max_y() const { return max_y_; }

 private:
  Vec2 a_, b_, c_;
  double tol_ = 0.0;
  double min_x_ = 0.0, max_x_ = 0.0, min_y_ = 0.0, max_y_ = 0.0;
};

// Counts samples of cell (row, col) inside the triangle; visibility is a
// per-cell property because the ray is traced over cell indices.
int count_samples(const TriangleTester& tri, const GridMap& map, int row,
                  int col, int s) {
  const double cs = map.cell_size();
  const double x0 = col * cs;
  const double y0 = row * cs;
  if (x0 > tri.max_x() || x0 + cs < tri.min_x() || y0 > tri.max_y() ||
      y0 + cs < tri.min_y()) {
    return 0;
  }
  int count = 0;
  for (int i = 0; i < s; ++i) {
    const double py = y0 + (i + 0.5) * cs / s;
    for (int j = 0; j < s; ++j) {
      const double px = x0 + (j + 0.5) * cs / s;
      if (tri.contains({px, py})) ++count;
    }
  }
  return count;
}

bool cell_visible(CellCoord source, CellCoord dest, const GridMap& map) {
  if (source == dest) return true;
  const auto cells = bresenham_cells(source, dest);
  for (std::size_t i = 1; i < cells.size(); ++i) {
    if (map.is_obstacle(map.index(cells[i]))) return false;
  }
  return true;
}

void check_sample_density(int s) {
  if (s < 1 || s > 256) {
    throw std::domain_error("sample density must be in [1, 256], got " +
                            std::to_string(s));
  }
}

}  // namespace

double CameraSpec::horizontal_angle_deg() const {
  return angle_override ? *angle_override
                        : horizontal_angle(sensor_width, focal_length);
}

double CameraSpec::half_angle_tan() const {
  if (angle_override) return std::tan(*angle_override * kDegToRad / 2.0);
  return sensor_width / (2.0 * focal_length);
}

GridMap::GridMap(double width, double height, double cell_size)
    : width_(width), height_(height), cell_size_(cell_size) {
  if (!(cell_size > 0.0) || !(width > 0.0) || !(height > 0.0)) {
    throw std::domain_error("map dimensions and cell size must be positive");
  }
  if (!is_integer_multiple(width, cell_size) ||
      !is_integer_multiple(height, cell_size)) {
    throw std::domain_error("map width and height must be integer multiples of the cell size");
  }
  cols_ = static_cast<int>(std::lround(width / cell_size));
  rows_ = static_cast<int>(std::lround(height / cell_size));
  obstacles_.assign(cell_count(), 0);
  private_.assign(cell_count(), 0);
}

CellCoord GridMap::cell_of(Vec2 p) const {
  if (!contains(p)) {
    throw std::domain_error("point (" + std::to_string(p.x) + ", " +
                            std::to_string(p.y) + ") lies outside the map");
  }
  const int col = std::min(static_cast<int>(std::floor(p.x / cell_size_)), cols_ - 1);
  const int row = std::min(static_cast<int>(std::floor(p.y / cell_size_)), rows_ - 1);
  return {row, col};
}

Vec2 GridMap::cell_center(CellIndex n) const {
  const auto c = coord(n);
  return {(c.col + 0.5) * cell_size_, (c.row + 0.5) * cell_size_};
}

void GridMap::clear_private() { std::fill(private_.begin(), private_.end(), 0); }

std::size_t GridMap::private_count() const {
  return static_cast<std::size_t>(std::count(private_.begin(), private_.end(), 1));
}

std::size_t GridMap::obstacle_count_() const {
  return static_cast<std::size_t>(std::count(obstacles_.begin(), obstacles_.end(), 1));
}

double FovTriangle::area() const { return std::abs(cross(apex, left, right)) / 2.0; }

bool FovTriangle::contains(Vec2 p) const { return TriangleTester(*this).contains(p); }

void validate(const CameraSpec& spec, const GridMap* map) {
  const std::string who = "camera " + std::to_string(spec.id) + ": ";
  if (!(spec.sensor_width > 0.0)) throw std::domain_error(who + "sensor width must be > 0");
  if (!(spec.focal_length > 0.0)) throw std::domain_error(who + "focal length must be > 0");
  if (!(spec.range > 0.0)) throw std::domain_error(who + "range must be > 0");
  if (spec.angle_override && !(*spec.angle_override > 0.0 && *spec.angle_override < 180.0)) {
    throw std::domain_error(who + "angle must lie in (0, 180) degrees");
  }
  if (map != nullptr && !map->contains(spec.location)) {
    throw std::domain_error(who + "location lies outside the map");
  }
}

double horizontal_angle(double sensor_width, double focal_length) {
  if (!(sensor_width > 0.0) || !(focal_length > 0.0)) {
    throw std::domain_error("horizontal_angle: inputs must be positive");
  }
  return 2.0 * std::atan(sensor_width / (2.0 * focal_length)) / kDegToRad;
}

double fov_area(double range, double sensor_width, double focal_length) {
  if (!(range > 0.0) || !(sensor_width > 0.0) || !(focal_length > 0.0)) {
    throw std::domain_error("fov_area: inputs must be positive");
  }
  return range * range * sensor_width / (2.0 * focal_length);
}

double fov_area(const CameraSpec& spec) {
  validate(spec);
  return spec.range * spec.range * spec.half_angle_tan();
}

Vec2 direction(double orientation_deg) {
  double d = std::fmod(orientation_deg, 360.0);
  if (d < 0.0) d += 360.0;
  if (d == 0.0) return {1.0, 0.0};
  if (d == 90.0) return {0.0, 1.0};
  if (d == 180.0) return {-1.0, 0.0};
  if (d == 270.0) return {0.0, -1.0};
  return {std::cos(d * kDegToRad), std::sin(d * kDegToRad)};
}

FovTriangle fov_triangle(const CameraSpec& spec, double orientation_deg) {
  validate(spec);
  const Vec2 u = direction(orientation_deg);
  const double x = spec.range;
  const double y = x * spec.half_angle_tan();
  const Vec2 a = spec.location;
  return FovTriangle{
      a,
      {a.x + u.x * x - u.y * y, a.y + u.y * x + u.x * y},
      {a.x + u.x * x + u.y * y, a.y + u.y * x - u.x * y},
  };
}

std::vector<CellCoord> bresenham_cells(CellCoord from, CellCoord to) {
  std::vector<CellCoord> out;
  int x = from.col, y = from.row;
  const int dx = std::abs(to.col - x);
  const int dy = -std::abs(to.row - y);
  const int sx = x < to.col ? 1 : -1;
  const int sy = y < to.row ? 1 : -1;
  int err = dx + dy;
  out.reserve(static_cast<std::size_t>(std::max(dx, -dy)) + 1);
  while (true) {
    out.push_back({y, x});
    if (x == to.col && y == to.row) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y += sy;
    }
  }
  return out;
}

bool point_visible(Vec2 from, Vec2 to, const GridMap& map) {
  return cell_visible(map.cell_of(from), map.cell_of(to), map);
}

int covered_samples(const CameraSpec& spec, double orientation_deg,
                    CellIndex cell, const GridMap& map, int sample_density) {
  check_sample_density(sample_density);
  const TriangleTester tri(fov_triangle(spec, orientation_deg));
  const auto c = map.coord(cell);
  const int n = count_samples(tri, map, c.row, c.col, sample_density);
  if (n == 0) return 0;
  return cell_visible(map.cell_of(spec.location), c, map) ? n : 0;
}

double coverage_ratio(const CameraSpec& spec, double orientation_deg,
                      CellIndex cell, const GridMap& map, int sample_density) {
  return static_cast<double>(covered_samples(spec, orientation_deg, cell, map, sample_density)) /
         (sample_density * sample_density);
}

SparseVector coverage_vector(const CameraSpec& spec, double orientation_deg,
                             const GridMap& map, int sample_density) {
  check_sample_density(sample_density);
  validate(spec, &map);
  const TriangleTester tri(fov_triangle(spec, orientation_deg));
  const double cs = map.cell_size();
  const int col_lo = std::max(0, static_cast<int>(std::floor(tri.min_x() / cs)));
  const int col_hi = std::min(map.cols() - 1, static_cast<int>(std::floor(tri.max_x() / cs)));
  const int row_lo = std::max(0, static_cast<int>(std::floor(tri.min_y() / cs)));
  const int row_hi = std::min(map.rows() - 1, static_cast<int>(std::floor(tri.max_y() / cs)));

  const bool occluders = map.has_obstacles();
  const CellCoord source = map.cell_of(spec.location);
  SparseVector out;
  for (int r = row_lo; r <= row_hi; ++r) {
    for (int c = col_lo; c <= col_hi; ++c) {
      const int n = count_samples(tri, map, r, c, sample_density);
      if (n == 0) continue;
      if (occluders && !cell_visible(source, {r, c}, map)) continue;
      out.push_back(map.index(r, c), n);
    }
  }
  return out;
}

}  // namespace privcam
