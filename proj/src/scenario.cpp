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

#include "privcam/scenario.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace privcam {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 4> kFixtures = {"open", "squares4", "lanes2",
                                                       "squares9"};

int scaled(double fraction, int dim) {
  return std::max(1, static_cast<int>(std::lround(fraction * dim)));
}

int centred_start(double centre, int size, int dim) {
  const int start = static_cast<int>(std::lround(centre - size / 2.0));
  return std::clamp(start, 0, std::max(0, dim - size));
}

std::vector<PrivateRegion> square_lattice(int per_side, int grid_rows, int grid_cols) {
  const int h = scaled(0.2, grid_rows);
  const int w = scaled(0.2, grid_cols);
  std::vector<PrivateRegion> out;
  for (int i = 0; i < per_side; ++i) {
    for (int j = 0; j < per_side; ++j) {
      out.push_back({centred_start(grid_rows * (i + 0.5) / per_side, h, grid_rows),
                     centred_start(grid_cols * (j + 0.5) / per_side, w, grid_cols), h, w});
    }
  }
  return out;
}

void check_region(const PrivateRegion& r, int rows, int cols) {
  if (r.rows <= 0 || r.cols <= 0) throw std::domain_error("region is empty");
  if (r.row < 0 || r.col < 0 || r.row + r.rows > rows || r.col + r.cols > cols) {
    throw std::domain_error("region [" + std::to_string(r.row) + "+" + std::to_string(r.rows) +
                            ", " + std::to_string(r.col) + "+" + std::to_string(r.cols) +
                            "] exceeds the " + std::to_string(rows) + "x" +
                            std::to_string(cols) + " grid");
  }
}

// --- JSON field access with paths -----------------------------------------

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ScenarioError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ScenarioError(path.empty() ? key : path + "." + key, "missing required field");
  }
  return *it;
}

double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ScenarioError(path, "expected a number");
  return v.get<double>();
}

int get_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ScenarioError(path, "expected an integer");
  return v.get<int>();
}

std::optional<double> optional_number(const json& obj, const std::string& key,
                                      const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return get_number(*it, path + "." + key);
}

PrivateRegion parse_region(const json& v, const std::string& path) {
  return {get_int(require(v, "row", path), path + ".row"),
          get_int(require(v, "col", path), path + ".col"),
          get_int(require(v, "rows", path), path + ".rows"),
          get_int(require(v, "cols", path), path + ".cols")};
}

std::vector<PrivateRegion> parse_regions(const json& v, const std::string& path) {
  if (!v.is_array()) throw ScenarioError(path, "expected an array");
  std::vector<PrivateRegion> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(parse_region(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

json region_json(const PrivateRegion& r) {
  return {{"row", r.row}, {"col", r.col}, {"rows", r.rows}, {"cols", r.cols}};
}

json config_json(const ScenarioConfig& c) {
  json map = {{"width_m", c.width_m}, {"height_m", c.height_m}, {"cell_m", c.cell_m}};
  if (!c.obstacles.empty()) {
    json obs = json::array();
    for (const auto& r : c.obstacles) obs.push_back(region_json(r));
    map["obstacles"] = obs;
  }

  json cameras = {{"sensor_w_m", c.sensor_w_m}, {"focal_m", c.focal_m}};
  if (c.placement) {
    cameras["rows"] = c.placement->rows;
    cameras["cols"] = c.placement->cols;
  } else {
    json locs = json::array();
    for (const auto& p : c.locations) locs.push_back({p.x, p.y});
    cameras["locations"] = locs;
  }
  if (c.range_m) cameras["range_m"] = *c.range_m;
  if (c.angle_deg) cameras["angle_deg"] = *c.angle_deg;

  json privacy = json::object();
  if (c.fixture) privacy["fixture"] = *c.fixture;
  if (!c.rectangles.empty()) {
    json rects = json::array();
    for (const auto& r : c.rectangles) rects.push_back(region_json(r));
    privacy["rectangles"] = rects;
  }
  if (c.threshold_v) privacy["threshold_v"] = *c.threshold_v;

  return {{"label", c.label},
          {"map", map},
          {"cameras", cameras},
          {"privacy", privacy},
          {"plans", {{"count", c.plan_count}, {"sample_density", c.sample_density}}}};
}

}  // namespace

std::size_t TargetVector::required_count() const {
  return static_cast<std::size_t>(std::count(values.begin(), values.end(), 1));
}

std::string Placement::label() const {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

Placement parse_placement(std::string_view text) {
  const auto x = text.find_first_of("xX");
  Placement p;
  auto parse = [&](std::string_view part, int& out) {
    const auto res = std::from_chars(part.data(), part.data() + part.size(), out);
    return res.ec == std::errc() && res.ptr == part.data() + part.size() && out >= 1;
  };
  if (x == std::string_view::npos || !parse(text.substr(0, x), p.rows) ||
      !parse(text.substr(x + 1), p.cols)) {
    throw std::invalid_argument("placement must look like RxC, got '" + std::string(text) + "'");
  }
  return p;
}

TargetVector build_target(GridMap& map, std::span<const PrivateRegion> regions) {
  for (const auto& r : regions) check_region(r, map.rows(), map.cols());
  map.clear_private();
  for (const auto& r : regions) {
    for (int i = r.row; i < r.row + r.rows; ++i) {
      for (int j = r.col; j < r.col + r.cols; ++j) map.set_private(map.index(i, j));
    }
  }
  TargetVector t;
  t.values.resize(map.cell_count());
  for (std::size_t n = 0; n < t.values.size(); ++n) {
    const auto cell = static_cast<CellIndex>(n);
    t.values[n] = (map.is_private(cell) || map.is_obstacle(cell)) ? 0 : 1;
  }
  return t;
}

std::vector<Vec2> grid_placement(int rows, int cols, const GridMap& map) {
  if (rows < 1 || cols < 1) throw std::domain_error("placement needs rows, cols >= 1");
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(rows) * cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      out.push_back({(j + 0.5) * map.width() / cols, (i + 0.5) * map.height() / rows});
    }
  }
  return out;
}

std::span<const std::string_view> fixture_names() { return kFixtures; }

std::vector<PrivateRegion> fixture_regions(std::string_view fixture, int grid_rows,
                                           int grid_cols) {
  if (fixture == "open") return {};
  if (fixture == "squares4") return square_lattice(2, grid_rows, grid_cols);
  if (fixture == "squares9") return square_lattice(3, grid_rows, grid_cols);
  if (fixture == "lanes2") {
    const int w = scaled(0.15, grid_cols);
    return {{0, centred_start(grid_cols / 3.0, w, grid_cols), grid_rows, w},
            {0, centred_start(2.0 * grid_cols / 3.0, w, grid_cols), grid_rows, w}};
  }
  throw std::invalid_argument("unknown fixture '" + std::string(fixture) + "'");
}

double default_range(double area, std::size_t camera_count, double half_angle_tan) {
  if (camera_count == 0 || !(half_angle_tan > 0.0) || !(area > 0.0)) {
    throw std::domain_error("default_range: needs cameras, a positive angle and area");
  }
  return std::sqrt(area / (static_cast<double>(camera_count) * half_angle_tan));
}

double default_threshold(const std::vector<CameraSpec>& cameras, const GridMap& map) {
  if (cameras.empty()) return 0.0;
  return 0.05 * fov_area(cameras.front()) / map.cell_area();
}

Scenario build_scenario(const ScenarioConfig& c) {
  Scenario s;
  s.config = c;
  s.label = c.label;

  try {
    s.map = GridMap(c.width_m, c.height_m, c.cell_m);
  } catch (const std::domain_error& e) {
    throw ScenarioError("map", e.what());
  }
  for (std::size_t i = 0; i < c.obstacles.size(); ++i) {
    const auto& r = c.obstacles[i];
    try {
      check_region(r, s.map.rows(), s.map.cols());
    } catch (const std::domain_error& e) {
      throw ScenarioError("map.obstacles[" + std::to_string(i) + "]", e.what());
    }
    for (int a = r.row; a < r.row + r.rows; ++a) {
      for (int b = r.col; b < r.col + r.cols; ++b) s.map.set_obstacle(s.map.index(a, b));
    }
  }

  std::vector<Vec2> locations;
  if (c.placement) {
    if (c.placement->rows < 1) throw ScenarioError("cameras.rows", "must be >= 1");
    if (c.placement->cols < 1) throw ScenarioError("cameras.cols", "must be >= 1");
    locations = grid_placement(c.placement->rows, c.placement->cols, s.map);
  } else {
    locations = c.locations;
  }
  if (locations.empty()) throw ScenarioError("cameras", "at least one camera is required");
  if (!(c.sensor_w_m > 0.0)) throw ScenarioError("cameras.sensor_w_m", "must be > 0");
  if (!(c.focal_m > 0.0)) throw ScenarioError("cameras.focal_m", "must be > 0");
  if (c.angle_deg && !(*c.angle_deg > 0.0 && *c.angle_deg < 180.0)) {
    throw ScenarioError("cameras.angle_deg", "must lie in (0, 180)");
  }
  if (c.range_m && !(*c.range_m > 0.0)) throw ScenarioError("cameras.range_m", "must be > 0");

  CameraSpec proto;
  proto.sensor_width = c.sensor_w_m;
  proto.focal_length = c.focal_m;
  proto.angle_override = c.angle_deg;
  proto.range = c.range_m ? *c.range_m
                          : default_range(c.width_m * c.height_m, locations.size(),
                                          proto.half_angle_tan());
  for (std::size_t i = 0; i < locations.size(); ++i) {
    CameraSpec cam = proto;
    cam.id = i;
    cam.location = locations[i];
    try {
      validate(cam, &s.map);
    } catch (const std::domain_error& e) {
      throw ScenarioError(c.placement ? "cameras" : "cameras.locations[" + std::to_string(i) + "]",
                          e.what());
    }
    s.cameras.push_back(cam);
  }

  if (c.fixture) {
    try {
      s.private_regions = fixture_regions(*c.fixture, s.map.rows(), s.map.cols());
    } catch (const std::invalid_argument& e) {
      throw ScenarioError("privacy.fixture", e.what());
    }
  }
  for (std::size_t i = 0; i < c.rectangles.size(); ++i) {
    try {
      check_region(c.rectangles[i], s.map.rows(), s.map.cols());
    } catch (const std::domain_error& e) {
      throw ScenarioError("privacy.rectangles[" + std::to_string(i) + "]", e.what());
    }
    s.private_regions.push_back(c.rectangles[i]);
  }
  s.target = build_target(s.map, s.private_regions);

  if (c.plan_count < 1) throw ScenarioError("plans.count", "must be >= 1");
  if (c.sample_density < 1 || c.sample_density > 256) {
    throw ScenarioError("plans.sample_density", "must lie in [1, 256]");
  }
  s.plan_count = c.plan_count;
  s.sample_density = c.sample_density;

  if (c.threshold_v && !(*c.threshold_v >= 0.0)) {
    throw ScenarioError("privacy.threshold_v", "must be >= 0");
  }
  s.privacy_threshold = c.threshold_v ? *c.threshold_v : default_threshold(s.cameras, s.map);
  return s;
}

ScenarioConfig parse_scenario_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("<document>", e.what());
  }
  if (!doc.is_object()) throw ScenarioError("<document>", "expected a JSON object");

  ScenarioConfig c;
  c.placement.reset();
  if (auto it = doc.find("label"); it != doc.end()) {
    if (!it->is_string()) throw ScenarioError("label", "expected a string");
    c.label = it->get<std::string>();
  }

  const json& map = require(doc, "map", "");
  c.width_m = get_number(require(map, "width_m", "map"), "map.width_m");
  c.height_m = get_number(require(map, "height_m", "map"), "map.height_m");
  c.cell_m = get_number(require(map, "cell_m", "map"), "map.cell_m");
  if (auto it = map.find("obstacles"); it != map.end()) {
    c.obstacles = parse_regions(*it, "map.obstacles");
  }

  const json& cams = require(doc, "cameras", "");
  if (!cams.is_object()) throw ScenarioError("cameras", "expected an object");
  const bool has_grid = cams.contains("rows") || cams.contains("cols");
  const bool has_list = cams.contains("locations");
  if (has_grid == has_list) {
    throw ScenarioError("cameras", "give either rows/cols or a locations list");
  }
  if (has_grid) {
    c.placement = Placement{get_int(require(cams, "rows", "cameras"), "cameras.rows"),
                            get_int(require(cams, "cols", "cameras"), "cameras.cols")};
  } else {
    const json& locs = cams.at("locations");
    if (!locs.is_array()) throw ScenarioError("cameras.locations", "expected an array");
    for (std::size_t i = 0; i < locs.size(); ++i) {
      const std::string path = "cameras.locations[" + std::to_string(i) + "]";
      if (!locs[i].is_array() || locs[i].size() != 2) {
        throw ScenarioError(path, "expected [x, y]");
      }
      c.locations.push_back({get_number(locs[i][0], path + "[0]"),
                             get_number(locs[i][1], path + "[1]")});
    }
  }
  c.sensor_w_m = get_number(require(cams, "sensor_w_m", "cameras"), "cameras.sensor_w_m");
  c.focal_m = get_number(require(cams, "focal_m", "cameras"), "cameras.focal_m");
  c.range_m = optional_number(cams, "range_m", "cameras");
  c.angle_deg = optional_number(cams, "angle_deg", "cameras");

  if (auto it = doc.find("privacy"); it != doc.end()) {
    const json& p = *it;
    if (!p.is_object()) throw ScenarioError("privacy", "expected an object");
    if (auto f = p.find("fixture"); f != p.end()) {
      if (!f->is_string()) throw ScenarioError("privacy.fixture", "expected a string");
      c.fixture = f->get<std::string>();
    }
    if (auto r = p.find("rectangles"); r != p.end()) {
      c.rectangles = parse_regions(*r, "privacy.rectangles");
    }
    c.threshold_v = optional_number(p, "threshold_v", "privacy");
  }

  const json& plans = require(doc, "plans", "");
  c.plan_count = get_int(require(plans, "count", "plans"), "plans.count");
  if (auto it = plans.find("sample_density"); it != plans.end()) {
    c.sample_density = get_int(*it, "plans.sample_density");
  }
  return c;
}

Scenario load_scenario(std::string_view json_text) {
  return build_scenario(parse_scenario_config(json_text));
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("<document>", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

std::string serialize_config(const ScenarioConfig& config) {
  return config_json(config).dump(2) + "\n";
}

std::string serialize_scenario(const Scenario& scenario) {
  return serialize_config(scenario.config);
}

ScenarioConfig desk_config(std::string_view fixture, Placement placement, int plan_count) {
  ScenarioConfig c;
  c.label = std::string(fixture);
  c.placement = placement;
  c.angle_deg = 45.0;
  c.fixture = std::string(fixture);
  c.plan_count = plan_count;
  return c;
}

}  // namespace privcam
