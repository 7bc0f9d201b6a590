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

// Test-side oracles and builders. The polygon and triangle helpers do not
// touch the library's geometry, so they serve as independent references.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "privcam/baselines.hpp"
#include "privcam/geometry.hpp"
#include "privcam/plangen.hpp"
#include "privcam/scenario.hpp"

namespace privcam::testing {

// Plan set from dense unit vectors; plan k gets plan_index k + 1.
inline PlanSet make_set(std::size_t camera_id, const std::vector<std::vector<Units>>& plans,
                        int units_per_cell = 1) {
  PlanSet set;
  set.camera_id = camera_id;
  set.units_per_cell = units_per_cell;
  int k = 1;
  for (const auto& dense : plans) {
    set.plans.push_back({camera_id, k, k * 360.0 / static_cast<double>(plans.size()),
                         SparseVector::from_dense(dense)});
    ++k;
  }
  return set;
}

inline TargetVector make_target(std::vector<std::uint8_t> v) { return TargetVector{std::move(v)}; }

// --- Exact polygon area oracle ---------------------------------------------

struct Pt {
  double x, y;
};

inline double polygon_area(const std::vector<Pt>& p) {
  double a = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Pt& u = p[i];
    const Pt& v = p[(i + 1) % p.size()];
    a += u.x * v.y - v.x * u.y;
  }
  return std::abs(a) / 2.0;
}

// Sutherland-Hodgman clip of a convex polygon to one axis-aligned
// half-plane: coord(axis) >= bound when keep_above, else <= bound.
inline std::vector<Pt> clip(const std::vector<Pt>& poly, int axis, double bound, bool keep_above) {
  auto coord = [&](const Pt& p) { return axis == 0 ? p.x : p.y; };
  auto inside = [&](const Pt& p) { return keep_above ? coord(p) >= bound : coord(p) <= bound; };
  std::vector<Pt> out;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Pt& a = poly[i];
    const Pt& b = poly[(i + 1) % poly.size()];
    const bool ia = inside(a), ib = inside(b);
    if (ia) out.push_back(a);
    if (ia != ib) {
      const double t = (bound - coord(a)) / (coord(b) - coord(a));
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  return out;
}

// Exact area of triangle (a, b, c) inside the rectangle [x0,x1] x [y0,y1].
inline double triangle_rect_overlap(Pt a, Pt b, Pt c, double x0, double x1, double y0, double y1) {
  std::vector<Pt> poly = {a, b, c};
  poly = clip(poly, 0, x0, true);
  if (!poly.empty()) poly = clip(poly, 0, x1, false);
  if (!poly.empty()) poly = clip(poly, 1, y0, true);
  if (!poly.empty()) poly = clip(poly, 1, y1, false);
  return poly.size() < 3 ? 0.0 : polygon_area(poly);
}

// Triangle vertices rebuilt from first principles (no library geometry).
inline std::vector<Pt> reference_triangle(Pt apex, double range, double angle_deg,
                                          double orientation_deg) {
  const double pi = std::acos(-1.0);
  const double half = range * std::tan(angle_deg * pi / 360.0);
  const double t = orientation_deg * pi / 180.0;
  const double c = std::cos(t), s = std::sin(t);
  return {apex,
          {apex.x + c * range - s * half, apex.y + s * range + c * half},
          {apex.x + c * range + s * half, apex.y + s * range - c * half}};
}

// Point-in-triangle by barycentric signs, with a small tolerance.
inline bool reference_contains(const std::vector<Pt>& tri, Pt p) {
  auto cross = [](Pt o, Pt a, Pt b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); };
  const double d1 = cross(tri[0], tri[1], p);
  const double d2 = cross(tri[1], tri[2], p);
  const double d3 = cross(tri[2], tri[0], p);
  const double eps = 1e-9;
  const bool neg = d1 < -eps || d2 < -eps || d3 < -eps;
  const bool pos = d1 > eps || d2 > eps || d3 > eps;
  return !(neg && pos);
}

// --- Tiny random instances --------------------------------------------------

struct TinyInstance {
  Scenario scenario;
  std::vector<PlanSet> plan_sets;
};

// A random scenario on a 6x6-cell map (60 m x 60 m) with 2..4 cameras and
// 3..6 candidate orientations, optionally one private rectangle. Nonzero
// `cameras` or `plans` pin those counts. Plan sets are unconstrained and
// never empty.
inline TinyInstance random_tiny_instance(std::uint64_t seed, bool with_private = true,
                                         int cameras = 0, int plans = 0) {
  std::mt19937_64 rng(seed);
  auto uni = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };
  auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng() % (hi - lo + 1)); };

  for (;;) {
    ScenarioConfig c;
    c.label = "tiny";
    c.width_m = 60;
    c.height_m = 60;
    c.cell_m = 10;
    c.placement.reset();
    const int cams = cameras > 0 ? cameras : pick(2, 4);
    for (int i = 0; i < cams; ++i) c.locations.push_back({uni(1, 59), uni(1, 59)});
    c.range_m = uni(15, 35);
    c.angle_deg = uni(40, 110);
    c.plan_count = plans > 0 ? plans : pick(3, 6);
    c.fixture.reset();
    if (with_private && rng() % 2 == 0) {
      const int r = pick(0, 4), col = pick(0, 4);
      c.rectangles.push_back({r, col, pick(1, 6 - r), pick(1, 6 - col)});
    }
    TinyInstance t{build_scenario(c), {}};
    bool ok = true;
    for (const auto& cam : t.scenario.cameras) {
      PlanSet ps = generate_plans(cam, t.scenario.plan_count, t.scenario.map, t.scenario.target,
                                  0.0, PlanMode::kUnconstrained, t.scenario.sample_density);
      if (ps.plans.empty()) ok = false;
      t.plan_sets.push_back(std::move(ps));
    }
    if (ok) return t;
  }
}

}  // namespace privcam::testing
