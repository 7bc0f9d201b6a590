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

#include <doctest.h>

#include <cmath>
#include <random>

#include "privcam/geometry.hpp"
#include "support.hpp"

using namespace privcam;
using privcam::testing::Pt;

namespace {

constexpr double kPi = 3.14159265358979323846;

CameraSpec camera(Vec2 at, double range, std::optional<double> angle = std::nullopt) {
  CameraSpec c;
  c.location = at;
  c.sensor_width = 0.035;
  c.focal_length = 0.031;
  c.range = range;
  c.angle_override = angle;
  return c;
}

bool near_rel(double a, double b, double rel = 1e-9) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

}  // namespace

TEST_CASE("horizontal angle") {
  // 2 atan(35 / 62) in degrees, evaluated independently.
  CHECK(near_rel(horizontal_angle(0.035, 0.031), 58.890857459851205));
  const double f = 0.05;
  CHECK(near_rel(horizontal_angle(2 * f * std::tan(22.5 * kPi / 180), f), 45.0));
  CHECK(near_rel(horizontal_angle(2 * f, f), 90.0));
  CHECK_THROWS_AS(horizontal_angle(0.0, 0.031), std::domain_error);
  CHECK_THROWS_AS(horizontal_angle(0.035, -1.0), std::domain_error);
}

TEST_CASE("field-of-view area") {
  CHECK(near_rel(fov_area(100, 0.035, 0.031), 5645.161290322581));
  const double f = 0.031;
  CHECK(near_rel(fov_area(100, 2 * f * std::tan(22.5 * kPi / 180), f), 4142.13562373095));
  CHECK(fov_area(1e-6, 0.035, 0.031) < 1e-9);
  CHECK_THROWS_AS(fov_area(0.0, 0.035, 0.031), std::domain_error);
  CHECK(near_rel(fov_area(camera({0, 0}, 100, 45.0)), 4142.13562373095));
}

TEST_CASE("triangle vertices") {
  const FovTriangle a = fov_triangle(camera({0, 0}, 1, 90.0), 0);
  CHECK(a.left.x == doctest::Approx(1));
  CHECK(a.left.y == doctest::Approx(1));
  CHECK(a.right.x == doctest::Approx(1));
  CHECK(a.right.y == doctest::Approx(-1));

  const FovTriangle b = fov_triangle(camera({0, 0}, 1, 90.0), 90);
  CHECK(b.left.x == doctest::Approx(-1));
  CHECK(b.left.y == doctest::Approx(1));
  CHECK(b.right.x == doctest::Approx(1));
  CHECK(b.right.y == doctest::Approx(1));

  const FovTriangle c = fov_triangle(camera({5, 5}, 2, 45.0), 180);
  CHECK(c.left.x == doctest::Approx(3));
  CHECK(c.right.x == doctest::Approx(3));
  CHECK(std::min(c.left.y, c.right.y) == doctest::Approx(5 - 0.8284271247461901));
  CHECK(std::max(c.left.y, c.right.y) == doctest::Approx(5 + 0.8284271247461901));
}

TEST_CASE("triangle area and edge lengths match the closed form for random specs") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 100; ++i) {
    CameraSpec c = camera({u(rng) * 100, u(rng) * 100}, 1 + u(rng) * 200);
    if (i % 2) c.angle_override = 1 + u(rng) * 178;
    const double theta = u(rng) * 360;
    const FovTriangle t = fov_triangle(c, theta);
    CHECK(near_rel(t.area(), fov_area(c)));
    const double half = c.range * c.half_angle_tan();
    const double edge = std::hypot(c.range, half);
    CHECK(near_rel(std::hypot(t.left.x - t.apex.x, t.left.y - t.apex.y), edge));
    CHECK(near_rel(std::hypot(t.right.x - t.apex.x, t.right.y - t.apex.y), edge));
  }
}

TEST_CASE("camera parameter validation") {
  GridMap map(100, 100, 10);
  CHECK_THROWS_AS(validate(camera({50, 50}, 0)), std::domain_error);
  CHECK_THROWS_AS(validate(camera({50, 50}, 10, 180.0)), std::domain_error);
  CHECK_THROWS_AS(validate(camera({150, 50}, 10), &map), std::domain_error);
  CHECK_NOTHROW(validate(camera({100, 100}, 10), &map));
}

TEST_CASE("grid map layout") {
  CHECK_THROWS_AS(GridMap(105, 100, 10), std::domain_error);
  GridMap map(100, 50, 10);
  CHECK(map.rows() == 5);
  CHECK(map.cols() == 10);
  CHECK(map.cell_count() == 50);
  CHECK(map.index(2, 3) == 23);
  CHECK(map.coord(23) == CellCoord{2, 3});
  CHECK(map.cell_of({35, 25}) == CellCoord{2, 3});
  CHECK(map.cell_of({100, 50}) == CellCoord{4, 9});
  CHECK_THROWS_AS(map.cell_of({-1, 0}), std::domain_error);
}

TEST_CASE("Bresenham traversal enumerated by hand") {
  const std::vector<CellCoord> want = {{0, 0}, {0, 1}, {1, 2}, {1, 3}, {2, 4}, {2, 5}};
  CHECK(bresenham_cells({0, 0}, {2, 5}) == want);
  const std::vector<CellCoord> diag = {{4, 4}, {3, 3}, {2, 2}, {1, 1}};
  CHECK(bresenham_cells({4, 4}, {1, 1}) == diag);
  CHECK(bresenham_cells({3, 3}, {3, 3}) == std::vector<CellCoord>{{3, 3}});
}

TEST_CASE("line of sight on a 10x10 grid") {
  GridMap map(100, 100, 10);
  const Vec2 a{5, 5}, b{65, 65};  // cells (0,0) and (6,6)
  CHECK(point_visible(a, b, map));
  CHECK(point_visible({12, 13}, {17, 18}, map));

  map.set_obstacle(map.index(3, 3));  // on the diagonal
  CHECK_FALSE(point_visible(a, b, map));
  CHECK_FALSE(point_visible(b, a, map));
  CHECK(point_visible(a, {65, 5}, map));     // along row 0
  CHECK(point_visible({35, 35}, {36, 37}, map));  // source cell is never checked
  CHECK_FALSE(point_visible(a, {35, 35}, map));   // destination obstacle

  GridMap side(100, 100, 10);
  side.set_obstacle(side.index(0, 2));  // off the (0,0)-(2,5) line
  CHECK(point_visible({5, 5}, {55, 25}, side));
  side.set_obstacle(side.index(1, 3));  // on it
  CHECK_FALSE(point_visible({5, 5}, {55, 25}, side));

  CHECK_THROWS_AS(point_visible({5, 5}, {105, 5}, map), std::domain_error);
}

TEST_CASE("visibility is symmetric on an obstacle-free map") {
  std::mt19937_64 rng(11);
  const GridMap map(200, 200, 10);
  std::uniform_real_distribution<double> u(0, 200);
  for (int i = 0; i < 500; ++i) {
    const Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
    CHECK(point_visible(a, b, map));
    CHECK(point_visible(b, a, map));
  }
}

TEST_CASE("an obstacle on the traced cells blocks the ray") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> cell(0, 19);
  for (int i = 0; i < 200; ++i) {
    const CellCoord from{cell(rng), cell(rng)}, to{cell(rng), cell(rng)};
    const auto path = bresenham_cells(from, to);
    REQUIRE(path.front() == from);
    REQUIRE(path.back() == to);
    if (path.size() < 3) continue;
    GridMap map(200, 200, 10);
    const Vec2 a{10.0 * from.col + 5, 10.0 * from.row + 5};
    const Vec2 b{10.0 * to.col + 5, 10.0 * to.row + 5};
    map.set_obstacle(map.index(path[1 + rng() % (path.size() - 2)]));
    CHECK_FALSE(point_visible(a, b, map));
  }
}

TEST_CASE("coverage of a cell") {
  GridMap map(100, 100, 10);
  const CameraSpec c = camera({55, 55}, 30, 90.0);
  // Facing +X: cells behind the camera are untouched.
  CHECK(coverage_ratio(c, 0, map.index(5, 0), map) == 0.0);
  // Cell (5,6) spans x in [60,70), y in [50,60): inside the 90-degree wedge
  // at distances 5..15 only where |y - 55| <= x - 55.
  CHECK(coverage_ratio(c, 0, map.index(5, 7), map) == 1.0);
  for (CellIndex n = 0; n < map.cell_count(); ++n) {
    const double r = coverage_ratio(c, 37, n, map);
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
  }
  GridMap blocked(100, 100, 10);
  blocked.set_obstacle(blocked.index(5, 6));
  CHECK(coverage_ratio(c, 0, blocked.index(5, 7), blocked) == 0.0);
  CHECK(coverage_ratio(c, 0, blocked.index(5, 6), blocked) == 0.0);
}

TEST_CASE("reconstructed two-dimensional worked example") {
  // Five 10 m cells in a row (a1..a5); the camera faces 30 degrees.
  GridMap map(50, 10, 10);
  const CameraSpec c = camera({12.114542287922996, 5.0}, 16.78028835840807, 79.10800212673011);
  const double expected[5] = {0.0, 0.4, 0.7, 0.1, 0.0};

  // Exact areas by polygon clipping confirm the layout itself.
  const auto tri = privcam::testing::reference_triangle({c.location.x, c.location.y}, c.range,
                                                        *c.angle_override, 30);
  for (int j = 0; j < 5; ++j) {
    const double area =
        privcam::testing::triangle_rect_overlap(tri[0], tri[1], tri[2], 10 * j, 10 * j + 10, 0, 10);
    CHECK(area / 100 == doctest::Approx(expected[j]).epsilon(1e-6));
  }
  // Sampled ratios land within one quantum of the exact ones.
  for (int s : {4, 8, 16}) {
    for (int j = 0; j < 5; ++j) {
      const double r = coverage_ratio(c, 30, map.index(0, j), map, s);
      CHECK(std::abs(r - expected[j]) <= 1.0 / 16 + 1e-12);
    }
  }
  // Frozen sampled values at the default density.
  const double sampled[5] = {0.0, 0.375, 0.75, 0.0625, 0.0};
  for (int j = 0; j < 5; ++j) CHECK(coverage_ratio(c, 30, map.index(0, j), map) == sampled[j]);
}

TEST_CASE("sampled coverage agrees with an independent point-in-triangle count") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  GridMap map(200, 200, 10);
  long long disagreements = 0, samples = 0;
  for (int i = 0; i < 40; ++i) {
    const CameraSpec c = camera({u(rng) * 200, u(rng) * 200}, 20 + u(rng) * 80, 20 + u(rng) * 140);
    const double theta = u(rng) * 360;
    const auto tri = privcam::testing::reference_triangle({c.location.x, c.location.y}, c.range,
                                                          *c.angle_override, theta);
    const SparseVector v = coverage_vector(c, theta, map);
    for (int r = 0; r < map.rows(); ++r) {
      for (int col = 0; col < map.cols(); ++col) {
        int want = 0;
        for (int a = 0; a < 4; ++a) {
          for (int b = 0; b < 4; ++b) {
            want += privcam::testing::reference_contains(
                tri, {10.0 * col + 10.0 * (b + 0.5) / 4, 10.0 * r + 10.0 * (a + 0.5) / 4});
          }
        }
        disagreements += std::abs(want - v.at(map.index(r, col)));
        samples += 16;
      }
    }
  }
  // Only samples within floating-point reach of an edge may differ.
  CHECK(disagreements <= samples / 100000);
}

TEST_CASE("sampled mass stays under the rasterization bound") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  GridMap map(400, 400, 10);
  for (int s : {2, 4, 8}) {
    for (int i = 0; i < 50; ++i) {
      // Ranges of at least two cells keep the boundary band proportionate.
      const CameraSpec c =
          camera({u(rng) * 400, u(rng) * 400}, 20 + u(rng) * 150, 20 + u(rng) * 140);
      const SparseVector v = coverage_vector(c, u(rng) * 360, map, s);
      const double area = static_cast<double>(v.sum()) / (s * s) * map.cell_area();
      CHECK(area <= fov_area(c) * (1.0 + 2.0 / s));
    }
  }
}

TEST_CASE("coverage is empty when facing off the map") {
  GridMap map(100, 100, 10);
  const CameraSpec c = camera({0.5, 50}, 30, 40.0);
  CHECK(coverage_vector(c, 180, map).empty());
}

TEST_CASE("opposite orientations from the centre mirror each other") {
  GridMap map(100, 100, 10);
  const CameraSpec c = camera({50, 50}, 35, 60.0);
  for (double theta : {0.0, 90.0}) {
    const SparseVector a = coverage_vector(c, theta, map);
    const SparseVector b = coverage_vector(c, theta + 180, map);
    REQUIRE(a.size() == b.size());
    for (const auto& e : a) {
      const CellCoord rc = map.coord(e.cell);
      CHECK(b.at(map.index(9 - rc.row, 9 - rc.col)) == e.value);
    }
  }
  // Away from the axes the mirror holds up to edge rounding.
  const SparseVector a = coverage_vector(c, 33, map);
  const SparseVector b = coverage_vector(c, 213, map);
  CHECK(std::abs(a.sum() - b.sum()) <= 2);
}

TEST_CASE("quarter-turn about the map centre permutes coverage exactly") {
  GridMap map(100, 100, 10);
  GridMap turned(100, 100, 10);
  // (r, c) -> (c, 9 - r) is a +90 degree turn of the cell lattice.
  for (auto [r, col] : {std::pair{2, 3}, std::pair{7, 1}, std::pair{4, 8}}) {
    map.set_obstacle(map.index(r, col));
    turned.set_obstacle(turned.index(col, 9 - r));
  }
  const Vec2 p{25, 35};
  const Vec2 q{100 - p.y, p.x};
  for (double theta : {0.0, 90.0, 180.0, 270.0}) {
    const SparseVector a = coverage_vector(camera(p, 45, 70.0), theta, map);
    const SparseVector b = coverage_vector(camera(q, 45, 70.0), theta + 90, turned);
    REQUIRE(a.size() == b.size());
    for (const auto& e : a) {
      const CellCoord rc = map.coord(e.cell);
      CHECK(b.at(turned.index(rc.col, 9 - rc.row)) == e.value);
    }
  }
}

TEST_CASE("covered mass grows with range") {
  GridMap map(300, 300, 10);
  for (double theta : {0.0, 45.0, 123.0, 271.0}) {
    Units last = 0;
    for (double x = 5; x <= 200; x += 5) {
      const Units m = coverage_vector(camera({140, 160}, x, 50.0), theta, map).sum();
      CHECK(m >= last);
      last = m;
    }
  }
}

TEST_CASE("sample density bounds") {
  GridMap map(100, 100, 10);
  CHECK_THROWS_AS(coverage_vector(camera({50, 50}, 10), 0, map, 0), std::domain_error);
  CHECK_THROWS_AS(coverage_vector(camera({50, 50}, 10), 0, map, 257), std::domain_error);
}
