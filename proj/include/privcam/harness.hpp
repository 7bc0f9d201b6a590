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

// Experiment driver. A sweep is the cross product fixtures x placements x
// K values; every method runs on every sweep point. Output layout:
//
//   <out>/metrics.csv                      every row of the sweep
//   <out>/manifest.json                    config hash, seed, versions, time
//   <out>/<scenario>/<method>/metrics.csv
//   <out>/<scenario>/<method>/summary.csv  engine methods only
//   <out>/<scenario>/<method>/trace_<P>_k<K>.csv     engine methods only
//   <out>/<scenario>/<method>/heatmap_<P>_k<K>.csv / .pgm
//   <out>/<scenario>/<method>/selection_<P>_k<K>.csv
//
// where <P> is the placement label. Everything but the manifest is a
// deterministic function of the spec.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "privcam/baselines.hpp"
#include "privcam/coordination.hpp"
#include "privcam/evaluation.hpp"
#include "privcam/plangen.hpp"
#include "privcam/scenario.hpp"

namespace privcam {

inline constexpr std::string_view kVersion = "1.0.0";

enum class Method { kEngine, kEngineHc, kGgv, kGgvPrivate, kGreedy, kHillclimb, kExhaustive };

std::string_view to_string(Method m);
// Throws std::invalid_argument for unknown names.
Method parse_method(std::string_view name);
std::vector<Method> parse_methods(std::string_view comma_list);
std::span<const Method> all_methods();

// Camera lattice with an optional horizontal-angle override: "RxC" or
// "RxC@deg".
struct PlacementSpec {
  Placement grid;
  std::optional<double> angle_deg;

  std::string label() const;
  bool operator==(const PlacementSpec&) const = default;
};
PlacementSpec parse_placement_spec(std::string_view text);
std::vector<PlacementSpec> parse_placement_list(std::string_view comma_list);
std::vector<int> parse_int_list(std::string_view comma_list);

struct ExperimentSpec {
  // A built-in fixture name (desk-scale map) or a JSON config path.
  std::string scenario = "open";
  std::vector<Method> methods = {Method::kEngine, Method::kEngineHc, Method::kGgv,
                                 Method::kGgvPrivate};
  // Empty axes keep the scenario's own value.
  std::vector<int> k_values;
  std::vector<PlacementSpec> placements;
  std::vector<std::string> fixtures;

  int repetitions = 40;
  int iterations = 40;
  int arity = 2;
  std::uint64_t seed = 0;
  std::optional<double> threshold_v;
  std::optional<int> sample_density;
  InfeasiblePolicy on_infeasible = InfeasiblePolicy::kError;
  int hillclimb_restarts = 20;
  std::uint64_t exhaustive_budget = kDefaultExhaustiveBudget;
  CostModel cost;

  std::filesystem::path out = "out";
  int workers = 1;
};

// Throws std::invalid_argument naming the offending field.
void validate(const ExperimentSpec& spec);

// Resolved scenario for one point of the sweep.
struct SweepPoint {
  std::string fixture;  // empty when the scenario's own layout is used
  std::optional<PlacementSpec> placement;
  std::optional<int> k;
  ScenarioConfig config;

  std::string tag() const;  // "<placement>_k<K>"
};

std::vector<SweepPoint> expand_sweep(const ExperimentSpec& spec);

struct MethodOutcome {
  Method method{};
  MetricsReport metrics;
  std::vector<std::size_t> camera_ids;
  std::vector<std::size_t> choices;
  Aggregate aggregate;
  std::optional<RunResult> run;  // engine methods only
};

struct PointResult {
  SweepPoint point;
  Scenario scenario;
  PlanGeneration plain;
  std::optional<PlanGeneration> constrained;
  std::vector<MethodOutcome> methods;
  std::string error;  // non-empty if the point failed
};

// Runs every method of `spec` on one point; inner work uses `workers`
// threads. Throws on any module error.
PointResult run_point(const ExperimentSpec& spec, const SweepPoint& point, int workers = 1);

struct ExperimentResult {
  std::vector<PointResult> points;  // sweep order
  std::string config_hash;
  std::size_t failures = 0;

  std::vector<MetricsReport> rows() const;
};

// SHA-256 (hex) of the semantic inputs: everything except out and
// workers, with file scenarios hashed by their parsed content.
std::string config_hash(const ExperimentSpec& spec);

// Runs the sweep and writes the output tree. A failing point is recorded
// and skipped; the others are still written.
ExperimentResult cmd_run(const ExperimentSpec& spec);

std::string metrics_csv(const std::vector<MetricsReport>& rows);

// Writes the plan dataset of `scenario` to `path`. With `verify`, the file
// is re-imported and compared against the generated plans; a mismatch
// throws std::runtime_error.
PlanGeneration cmd_export_plans(const Scenario& scenario, PlanMode mode,
                                const std::filesystem::path& path, bool verify,
                                InfeasiblePolicy on_infeasible = InfeasiblePolicy::kError,
                                int workers = 1);

// Heatmap CSV -> PGM.
void cmd_render(const std::filesystem::path& csv, const std::filesystem::path& pgm);

// Desk-scale config for a fixture name, otherwise the parsed JSON file.
ScenarioConfig resolve_scenario_config(std::string_view ref);

// Writes `contents` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace privcam
