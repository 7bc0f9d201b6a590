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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "privcam/harness.hpp"

using namespace privcam;
namespace fs = std::filesystem;

namespace {

// Scratch directory removed on scope exit.
struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("privcam_test_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

ExperimentSpec small_spec(const fs::path& out) {
  ExperimentSpec spec;
  spec.scenario = "open";
  spec.methods = {Method::kEngine, Method::kEngineHc, Method::kGgv, Method::kGgvPrivate,
                  Method::kGreedy, Method::kHillclimb};
  spec.fixtures = {"open", "squares4"};
  spec.placements = {parse_placement_spec("2x2"), parse_placement_spec("3x3")};
  spec.k_values = {8, 16};
  spec.repetitions = 3;
  spec.iterations = 5;
  spec.hillclimb_restarts = 2;
  spec.seed = 11;
  spec.out = out;
  return spec;
}

}  // namespace

TEST_CASE("method and axis parsing") {
  for (Method m : all_methods()) CHECK(parse_method(to_string(m)) == m);
  CHECK(parse_methods("iepos,ggv-private") == std::vector<Method>{Method::kEngine, Method::kGgvPrivate});
  CHECK_THROWS_AS(parse_method("optimal"), std::invalid_argument);
  CHECK_THROWS_AS(parse_methods(""), std::invalid_argument);

  const PlacementSpec p = parse_placement_spec("4x3@34.9");
  CHECK(p.grid == Placement{4, 3});
  CHECK(p.angle_deg == 34.9);
  CHECK(p.label() == "4x3@34.9");
  CHECK(parse_placement_spec("6x6").label() == "6x6");
  CHECK_THROWS_AS(parse_placement_spec("6x6@"), std::invalid_argument);
  CHECK_THROWS_AS(parse_placement_spec("6x6@200"), std::invalid_argument);
  CHECK(parse_placement_list("2x2,4x4").size() == 2);
  CHECK(parse_int_list("10,20,45") == std::vector<int>{10, 20, 45});
  CHECK_THROWS_AS(parse_int_list("10,,20"), std::invalid_argument);
  CHECK_THROWS_AS(parse_int_list("ten"), std::invalid_argument);
}

TEST_CASE("experiment validation names the field") {
  ExperimentSpec s;
  s.methods.clear();
  CHECK_THROWS_WITH_AS(validate(s), doctest::Contains("methods"), std::invalid_argument);
  s = {};
  s.fixtures = {"nowhere"};
  CHECK_THROWS_WITH_AS(validate(s), doctest::Contains("fixtures"), std::invalid_argument);
  s = {};
  s.repetitions = 0;
  CHECK_THROWS_WITH_AS(validate(s), doctest::Contains("reps"), std::invalid_argument);
  s = {};
  s.threshold_v = -0.5;
  CHECK_THROWS_WITH_AS(validate(s), doctest::Contains("v:"), std::invalid_argument);
  s = {};
  s.k_values = {5, 0};
  CHECK_THROWS_WITH_AS(validate(s), doctest::Contains("k:"), std::invalid_argument);
  CHECK_NOTHROW(validate(ExperimentSpec{}));
  CHECK_THROWS_AS(resolve_scenario_config("/no/such/file.json"), std::invalid_argument);
}

TEST_CASE("sweep expansion") {
  TempDir tmp;
  const ExperimentSpec spec = small_spec(tmp.path);
  const auto points = expand_sweep(spec);
  REQUIRE(points.size() == 8);
  CHECK(points[0].config.label == "open");
  CHECK(points[0].tag() == "2x2_k8");
  CHECK(points[1].tag() == "2x2_k16");
  CHECK(points[2].tag() == "3x3_k8");
  CHECK(points[4].config.fixture == "squares4");
  CHECK(points[7].config.placement == Placement{3, 3});

  ExperimentSpec plain;
  const auto one = expand_sweep(plain);
  REQUIRE(one.size() == 1);
  CHECK(one[0].config == desk_config("open"));
  CHECK(one[0].tag() == "4x4_k90");

  plain.placements = {parse_placement_spec("4x3@34.9")};
  CHECK(expand_sweep(plain)[0].config.angle_deg == 34.9);
}

TEST_CASE("a one-camera exhaustive run writes one row and one heatmap") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "one.json";
  std::ofstream(cfg) << R"({"label": "single",
    "map": {"width_m": 100, "height_m": 100, "cell_m": 10},
    "cameras": {"rows": 1, "cols": 1, "sensor_w_m": 0.035, "focal_m": 0.031, "range_m": 40},
    "plans": {"count": 4}})";
  ExperimentSpec spec;
  spec.scenario = cfg.string();
  spec.methods = {Method::kExhaustive};
  spec.out = tmp.path / "out";
  const ExperimentResult r = cmd_run(spec);
  CHECK(r.failures == 0);
  REQUIRE(r.rows().size() == 1);
  CHECK(r.rows()[0].method == "exhaustive");
  const fs::path dir = spec.out / "single" / "exhaustive";
  CHECK(lines(slurp(spec.out / "metrics.csv")) == 2);
  CHECK(lines(slurp(dir / "metrics.csv")) == 2);
  CHECK(fs::exists(dir / "heatmap_1x1_k4.csv"));
  CHECK(fs::exists(dir / "heatmap_1x1_k4.pgm"));
  CHECK(fs::exists(dir / "selection_1x1_k4.csv"));
  CHECK_FALSE(fs::exists(dir / "trace_1x1_k4.csv"));
  std::size_t heatmaps = 0;
  for (const auto& e : fs::recursive_directory_iterator(spec.out)) {
    heatmaps += e.path().extension() == ".pgm";
  }
  CHECK(heatmaps == 1);

  const auto manifest = nlohmann::json::parse(slurp(spec.out / "manifest.json"));
  CHECK(manifest["config_hash"] == r.config_hash);
  CHECK(manifest["failures"].empty());
}

TEST_CASE("runs are byte-for-byte reproducible") {
  TempDir tmp;
  ExperimentSpec a = small_spec(tmp.path / "a");
  ExperimentSpec b = small_spec(tmp.path / "b");
  b.workers = 4;
  const ExperimentResult ra = cmd_run(a);
  const ExperimentResult rb = cmd_run(b);
  CHECK(ra.failures == 0);
  CHECK(ra.config_hash == rb.config_hash);
  const std::string metrics = slurp(a.out / "metrics.csv");
  CHECK(lines(metrics) == 1 + 8 * 6);
  CHECK(metrics == slurp(b.out / "metrics.csv"));
  std::size_t compared = 0;
  for (const auto& e : fs::recursive_directory_iterator(a.out)) {
    if (!e.is_regular_file() || e.path().filename() == "manifest.json") continue;
    const fs::path rel = fs::relative(e.path(), a.out);
    CHECK(slurp(e.path()) == slurp(b.out / rel));
    ++compared;
  }
  CHECK(compared > 100);
  CHECK(fs::exists(a.out / "squares4" / "iepos-hc" / "summary.csv"));
  CHECK(fs::exists(a.out / "squares4" / "iepos" / "trace_3x3_k16.csv"));
}

TEST_CASE("configuration hash tracks semantic inputs only") {
  const ExperimentSpec base = small_spec("x");
  const std::string h = config_hash(base);
  CHECK(h.size() == 64);
  ExperimentSpec s = base;
  s.out = "elsewhere";
  s.workers = 8;
  CHECK(config_hash(s) == h);

  auto differs = [&](auto&& mutate) {
    ExperimentSpec t = base;
    mutate(t);
    return config_hash(t) != h;
  };
  CHECK(differs([](ExperimentSpec& t) { t.seed = 12; }));
  CHECK(differs([](ExperimentSpec& t) { t.k_values = {8}; }));
  CHECK(differs([](ExperimentSpec& t) { t.threshold_v = 0.0; }));
  CHECK(differs([](ExperimentSpec& t) { t.methods.pop_back(); }));
  CHECK(differs([](ExperimentSpec& t) { t.repetitions = 4; }));
  CHECK(differs([](ExperimentSpec& t) { t.cost.mean_price = 2; }));
  CHECK(differs([](ExperimentSpec& t) { t.scenario = "lanes2"; }));
  CHECK(differs([](ExperimentSpec& t) { t.on_infeasible = InfeasiblePolicy::kIdle; }));
}

TEST_CASE("a failing sweep point is reported and the rest is kept") {
  TempDir tmp;
  ExperimentSpec spec;
  spec.methods = {Method::kEngineHc};
  spec.fixtures = {"open", "lanes2"};
  spec.placements = {parse_placement_spec("3x3")};
  spec.k_values = {8};
  spec.threshold_v = 0.0;
  spec.repetitions = 2;
  spec.iterations = 3;
  spec.out = tmp.path;
  const ExperimentResult r = cmd_run(spec);
  // The middle camera column sits inside a lane, so V = 0 leaves it nothing.
  CHECK(r.failures == 1);
  CHECK(r.points[0].error.empty());
  CHECK(r.points[1].error.find("lanes2/3x3_k8") != std::string::npos);
  CHECK(lines(slurp(tmp.path / "metrics.csv")) == 2);
  const auto manifest = nlohmann::json::parse(slurp(tmp.path / "manifest.json"));
  CHECK(manifest["failures"].size() == 1);

  spec.on_infeasible = InfeasiblePolicy::kIdle;
  const ExperimentResult idle = cmd_run(spec);
  CHECK(idle.failures == 0);
  CHECK(idle.rows()[1].idle_cameras > 0);
  CHECK(idle.rows()[1].privacy_violation_rate == 0.0);
}

TEST_CASE("plan export verifies and is byte-stable") {
  TempDir tmp;
  const Scenario s = build_scenario(desk_config("squares9", {3, 3}, 12));
  const PlanGeneration g = cmd_export_plans(s, PlanMode::kHardConstrained, tmp.path / "a.csv", true,
                                            InfeasiblePolicy::kIdle);
  cmd_export_plans(s, PlanMode::kHardConstrained, tmp.path / "b.csv", true, InfeasiblePolicy::kIdle, 3);
  CHECK(slurp(tmp.path / "a.csv") == slurp(tmp.path / "b.csv"));
  std::size_t rows = 0;
  for (const auto& ps : g.plan_sets) {
    for (const auto& p : ps.plans) rows += p.entries.size();
  }
  CHECK(lines(slurp(tmp.path / "a.csv")) == rows + 1);
}

TEST_CASE("render converts a heatmap CSV") {
  TempDir tmp;
  const fs::path csv = tmp.path / "h.csv";
  std::ofstream(csv) << kHeatmapCsvHeader << "\n0,0,0,1,1,match,0\n1,0,1,1,2,overlap,1\n";
  cmd_render(csv, tmp.path / "h.pgm");
  CHECK(slurp(tmp.path / "h.pgm") == "P2\n2 1\n255\n128 255\n");

  std::ofstream(tmp.path / "bad.csv") << kHeatmapCsvHeader << "\n0,0,0,1,1,match,0\n1,0,1,x,2,overlap,1\n";
  CHECK_THROWS_WITH_AS(cmd_render(tmp.path / "bad.csv", tmp.path / "bad.pgm"),
                       doctest::Contains("line 3"), std::runtime_error);
  CHECK_FALSE(fs::exists(tmp.path / "bad.pgm"));
}
