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

// privcam: command-line driver for coverage experiments.
//
//   privcam run              --scenario open --methods iepos,ggv --out out
//   privcam sweep-k          --placement 2x2,4x4 --k 10,90
//   privcam sweep-placement  --placement 6x6,4x4,4x3@34.9
//   privcam compare          --methods iepos,iepos-hc,ggv,ggv-private
//   privcam export-plans     --scenario squares4 --mode hc --out plans.csv --verify
//   privcam render           --in heatmap.csv --out heatmap.pgm
//
// Exit status: 0 success, 1 at least one sweep point failed, 2 bad usage
// or a fatal error.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "privcam/harness.hpp"

namespace {

using namespace privcam;

struct SweepArgs {
  std::string scenario{};
  std::string methods{};
  std::string k{};
  std::string placement{};
  std::string fixtures{};
  int reps = 40;
  int iters = 40;
  std::uint64_t seed = 0;
  std::string out = "out";
  int workers = 1;
  double v = -1;
  int sample_density = 0;
  std::string on_infeasible = "error";
  int restarts = 20;
  double price = 1.0;
};

void add_sweep_options(CLI::App* cmd, SweepArgs& a) {
  cmd->add_option("--scenario", a.scenario, "Fixture name or JSON config file")
      ->capture_default_str();
  cmd->add_option("--methods", a.methods,
                  "Comma list: iepos,iepos-hc,ggv,ggv-private,greedy,hillclimb,exhaustive")
      ->capture_default_str();
  cmd->add_option("--k", a.k, "Comma list of plan counts K")->capture_default_str();
  cmd->add_option("--placement", a.placement, "Comma list of RxC[@angle] camera grids")
      ->capture_default_str();
  cmd->add_option("--fixtures", a.fixtures, "Comma list of privacy fixtures")
      ->capture_default_str();
  cmd->add_option("--reps", a.reps, "Repetitions per engine run")->capture_default_str();
  cmd->add_option("--iters", a.iters, "Iterations per repetition")->capture_default_str();
  cmd->add_option("--seed", a.seed, "Base seed")->capture_default_str();
  cmd->add_option("--out", a.out, "Output directory")->capture_default_str();
  cmd->add_option("--workers", a.workers, "Worker threads")->capture_default_str();
  cmd->add_option("--v", a.v, "Privacy threshold V (default: 0.05 F / A_n)");
  cmd->add_option("--sample-density", a.sample_density, "Samples per cell side");
  cmd->add_option("--on-infeasible", a.on_infeasible,
                  "error | idle: what to do with cameras without feasible plans")
      ->check(CLI::IsMember({"error", "idle"}))
      ->capture_default_str();
  cmd->add_option("--restarts", a.restarts, "Hill-climb restarts")->capture_default_str();
  cmd->add_option("--price", a.price, "Mean price of a standard camera")->capture_default_str();
}

ExperimentSpec to_spec(const SweepArgs& a) {
  ExperimentSpec spec;
  spec.scenario = a.scenario;
  spec.methods = parse_methods(a.methods);
  if (!a.k.empty()) spec.k_values = parse_int_list(a.k);
  if (!a.placement.empty()) spec.placements = parse_placement_list(a.placement);
  if (!a.fixtures.empty()) {
    std::string rest = a.fixtures;
    for (std::size_t pos; (pos = rest.find(',')) != std::string::npos; rest.erase(0, pos + 1)) {
      spec.fixtures.push_back(rest.substr(0, pos));
    }
    spec.fixtures.push_back(rest);
  }
  spec.repetitions = a.reps;
  spec.iterations = a.iters;
  spec.seed = a.seed;
  spec.out = a.out;
  spec.workers = a.workers;
  if (a.v >= 0) spec.threshold_v = a.v;
  if (a.sample_density > 0) spec.sample_density = a.sample_density;
  spec.on_infeasible = a.on_infeasible == "idle" ? InfeasiblePolicy::kIdle : InfeasiblePolicy::kError;
  spec.hillclimb_restarts = a.restarts;
  spec.cost.mean_price = a.price;
  return spec;
}

int report(const ExperimentResult& r, const ExperimentSpec& spec) {
  std::cout << metrics_csv(r.rows());
  for (const auto& pr : r.points) {
    if (!pr.error.empty()) std::cerr << "error: " << pr.error << '\n';
  }
  std::cerr << r.points.size() << " sweep point(s), " << r.failures << " failed; results in "
            << spec.out.string() << " (config " << r.config_hash.substr(0, 12) << ")\n";
  return r.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy-aware multi-camera coverage experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  const std::string engine_vs_ggv = "iepos,iepos-hc,ggv,ggv-private";
  SweepArgs run_args{.scenario = "open", .methods = engine_vs_ggv};
  SweepArgs k_args{.scenario = "open",
                   .methods = engine_vs_ggv,
                   .k = "10,20,45,90,180",
                   .placement = "2x2,4x4,6x6"};
  SweepArgs placement_args{
      .scenario = "squares4", .methods = "iepos-hc", .placement = "6x6,4x4,4x3@34.9"};
  SweepArgs compare_args{
      .scenario = "open", .methods = engine_vs_ggv, .fixtures = "open,squares4,lanes2,squares9"};

  auto* run = app.add_subcommand("run", "Run methods over the sweep given by the flags");
  add_sweep_options(run, run_args);
  auto* sweep_k = app.add_subcommand("sweep-k", "Inefficiency versus plan count K");
  add_sweep_options(sweep_k, k_args);
  auto* sweep_p = app.add_subcommand("sweep-placement", "Cost and coverage versus placement");
  add_sweep_options(sweep_p, placement_args);
  auto* compare = app.add_subcommand("compare", "All metrics across privacy fixtures");
  add_sweep_options(compare, compare_args);

  std::string ex_scenario = "open", ex_out = "plans.csv", ex_mode = "plain", ex_policy = "error";
  bool ex_verify = false;
  double ex_v = -1;
  int ex_k = 0, ex_density = 0, ex_workers = 1;
  auto* exp = app.add_subcommand("export-plans", "Write the generated plan dataset as CSV");
  exp->add_option("--scenario", ex_scenario, "Fixture name or JSON config file")
      ->capture_default_str();
  exp->add_option("--out", ex_out, "Output CSV")->capture_default_str();
  exp->add_option("--mode", ex_mode, "plain | hc")
      ->check(CLI::IsMember({"plain", "hc"}))
      ->capture_default_str();
  exp->add_option("--k", ex_k, "Plan count K");
  exp->add_option("--v", ex_v, "Privacy threshold V");
  exp->add_option("--sample-density", ex_density, "Samples per cell side");
  exp->add_option("--on-infeasible", ex_policy, "error | idle")
      ->check(CLI::IsMember({"error", "idle"}))
      ->capture_default_str();
  exp->add_option("--workers", ex_workers, "Worker threads")->capture_default_str();
  exp->add_flag("--verify", ex_verify, "Re-import the file and compare");

  std::string r_in, r_out;
  auto* render = app.add_subcommand("render", "Render a heatmap CSV as a PGM image");
  render->add_option("--in", r_in, "Heatmap CSV")->required();
  render->add_option("--out", r_out, "Output PGM")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    for (auto [cmd, args] : {std::pair{run, &run_args}, std::pair{sweep_k, &k_args},
                             std::pair{sweep_p, &placement_args}, std::pair{compare, &compare_args}}) {
      if (!cmd->parsed()) continue;
      const ExperimentSpec spec = to_spec(*args);
      return report(cmd_run(spec), spec);
    }
    if (exp->parsed()) {
      ScenarioConfig config = resolve_scenario_config(ex_scenario);
      if (ex_k > 0) config.plan_count = ex_k;
      if (ex_v >= 0) config.threshold_v = ex_v;
      if (ex_density > 0) config.sample_density = ex_density;
      const Scenario sc = build_scenario(config);
      const PlanGeneration g = cmd_export_plans(
          sc, ex_mode == "hc" ? PlanMode::kHardConstrained : PlanMode::kUnconstrained, ex_out,
          ex_verify, ex_policy == "idle" ? InfeasiblePolicy::kIdle : InfeasiblePolicy::kError,
          ex_workers);
      std::size_t plans = 0;
      for (const auto& ps : g.plan_sets) plans += ps.plans.size();
      std::cerr << "wrote " << plans << " plans for " << g.plan_sets.size() << " cameras to "
                << ex_out << (ex_verify ? " (verified)" : "") << '\n';
      for (const auto& r : g.relaxations) {
        std::cerr << "camera " << r.camera_id << ": V relaxed " << r.from_threshold << " -> "
                  << r.to_threshold << '\n';
      }
      for (auto id : g.idle_cameras) std::cerr << "camera " << id << ": idle\n";
      return 0;
    }
    if (render->parsed()) {
      cmd_render(r_in, r_out);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
