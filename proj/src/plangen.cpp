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

#include "privcam/plangen.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

namespace privcam {

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

// Shortest representation that parses back to the same double.
std::string exact(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_threshold(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

struct CameraOutcome {
  std::optional<PlanSet> plans;
  std::vector<RelaxationEvent> relaxations;
};

CameraOutcome plans_for_camera(const Scenario& scenario, const CameraSpec& cam,
                               const PlanGenerationOptions& options) {
  CameraOutcome out;
  double threshold = scenario.privacy_threshold;
  for (int attempt = 0;; ++attempt) {
    try {
      out.plans = generate_plans(cam, scenario.plan_count, scenario.map, scenario.target,
                                 threshold, options.mode, scenario.sample_density);
      return out;
    } catch (const NoFeasiblePlanError&) {
      // Doubling cannot help a strict threshold.
      const bool can_relax = threshold > 0.0 && attempt < options.max_relaxations;
      if (!can_relax) {
        if (options.on_infeasible == InfeasiblePolicy::kIdle) return out;
        throw;
      }
      out.relaxations.push_back({cam.id, threshold, threshold * 2.0});
      threshold *= 2.0;
    }
  }
}

}  // namespace

std::string_view to_string(PlanMode mode) {
  return mode == PlanMode::kHardConstrained ? "hard-constrained" : "unconstrained";
}

NoFeasiblePlanError::NoFeasiblePlanError(std::size_t camera_id, double threshold)
    : std::runtime_error("camera " + std::to_string(camera_id) +
                         " has no feasible plan (threshold V=" + format_threshold(threshold) +
                         ")"),
      camera_id_(camera_id) {}

Units private_mass(const SparseVector& entries, const TargetVector& target) {
  Units mass = 0;
  for (const auto& e : entries) {
    if (target[e.cell] == 0) mass += e.value;
  }
  return mass;
}

bool within_threshold(Units private_units, double threshold, int units_per_cell) {
  return private_units == 0 ||
         static_cast<double>(private_units) < threshold * units_per_cell;
}

PlanSet generate_plans(const CameraSpec& spec, int plan_count, const GridMap& map,
                       const TargetVector& target, double threshold, PlanMode mode,
                       int sample_density) {
  if (plan_count < 1) throw std::domain_error("plan count K must be >= 1");
  if (!(threshold >= 0.0)) throw std::domain_error("threshold V must be >= 0");
  if (target.size() != map.cell_count()) {
    throw std::domain_error("target length does not match the map");
  }
  const int q = sample_density * sample_density;
  PlanSet set;
  set.camera_id = spec.id;
  set.mode = mode;
  set.units_per_cell = q;
  for (int k = 1; k <= plan_count; ++k) {
    const double theta = k * 360.0 / plan_count;
    SparseVector entries = coverage_vector(spec, theta, map, sample_density);
    if (entries.sum() <= 0) continue;
    if (mode == PlanMode::kHardConstrained &&
        !within_threshold(private_mass(entries, target), threshold, q)) {
      continue;
    }
    set.plans.push_back({spec.id, k, theta, std::move(entries)});
  }
  if (set.plans.empty() && mode == PlanMode::kHardConstrained) {
    throw NoFeasiblePlanError(spec.id, threshold);
  }
  return set;
}

PlanGeneration generate_all_plans(const Scenario& scenario,
                                  const PlanGenerationOptions& options) {
  const std::size_t n = scenario.cameras.size();
  std::vector<CameraOutcome> outcomes(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        outcomes[i] = plans_for_camera(scenario, scenario.cameras[i], options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(options.workers, 1, static_cast<int>(std::max<std::size_t>(n, 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // Lowest camera id wins so the reported failure is deterministic.
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  PlanGeneration result;
  result.camera_count = n;
  for (std::size_t i = 0; i < n; ++i) {
    auto& o = outcomes[i];
    result.relaxations.insert(result.relaxations.end(), o.relaxations.begin(),
                              o.relaxations.end());
    if (o.plans) {
      result.plan_sets.push_back(std::move(*o.plans));
    } else {
      result.idle_cameras.push_back(scenario.cameras[i].id);
    }
  }
  return result;
}

void export_plans(std::span<const PlanSet> plan_sets, std::ostream& out) {
  std::vector<const PlanSet*> sets;
  for (const auto& s : plan_sets) sets.push_back(&s);
  std::stable_sort(sets.begin(), sets.end(), [](const PlanSet* a, const PlanSet* b) {
    return a->camera_id < b->camera_id;
  });

  out << kPlanCsvHeader << '\n';
  for (const PlanSet* set : sets) {
    std::vector<const Plan*> plans;
    for (const auto& p : set->plans) plans.push_back(&p);
    std::stable_sort(plans.begin(), plans.end(), [](const Plan* a, const Plan* b) {
      return a->plan_index < b->plan_index;
    });
    const double q = set->units_per_cell;
    for (const Plan* p : plans) {
      const std::string theta = exact(p->orientation_deg);
      for (const auto& e : p->entries) {
        out << set->camera_id << ',' << p->plan_index << ',' << theta << ',' << e.cell << ','
            << fixed6(static_cast<double>(e.value) / q) << '\n';
      }
    }
  }
  if (!out) throw std::runtime_error("export_plans: write failed");
}

std::vector<PlanSet> import_plans(std::istream& in, int sample_density, PlanMode mode) {
  const int q = sample_density * sample_density;
  std::vector<PlanSet> sets;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw std::runtime_error("plan dataset line " + std::to_string(line_no) + ": " + why);
  };

  if (!std::getline(in, line)) {
    line_no = 1;
    fail("missing header");
  }
  ++line_no;
  if (line != kPlanCsvHeader) fail("unexpected header '" + line + "'");

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field[5];
    for (int i = 0; i < 5; ++i) {
      if (!std::getline(row, field[i], ',')) fail("expected 5 fields");
    }
    std::string extra;
    if (std::getline(row, extra, ',')) fail("expected 5 fields");

    std::size_t camera = 0, cell = 0;
    int plan_index = 0;
    double theta = 0, ratio = 0;
    try {
      std::size_t used = 0;
      camera = std::stoull(field[0], &used);
      if (used != field[0].size()) fail("bad camera_id");
      plan_index = std::stoi(field[1], &used);
      if (used != field[1].size()) fail("bad plan_index");
      theta = std::stod(field[2], &used);
      if (used != field[2].size()) fail("bad orientation_deg");
      cell = std::stoull(field[3], &used);
      if (used != field[3].size()) fail("bad cell_index");
      ratio = std::stod(field[4], &used);
      if (used != field[4].size()) fail("bad ratio");
    } catch (const std::logic_error&) {
      fail("non-numeric field");
    }
    // Six printed decimals carry at most 5e-7 rounding per ratio.
    const double scaled = ratio * q;
    const auto units = static_cast<Units>(std::llround(scaled));
    if (ratio <= 0.0 || ratio > 1.0 || std::abs(scaled - units) > 5e-7 * q + 1e-9) {
      fail("ratio " + field[4] + " is not a multiple of 1/" + std::to_string(q));
    }

    if (sets.empty() || sets.back().camera_id != camera) {
      if (!sets.empty() && sets.back().camera_id > camera) fail("camera ids must ascend");
      sets.push_back({camera, {}, mode, q});
    }
    auto& plans = sets.back().plans;
    if (plans.empty() || plans.back().plan_index != plan_index) {
      if (!plans.empty() && plans.back().plan_index > plan_index) fail("plan indices must ascend");
      plans.push_back({camera, plan_index, theta, {}});
    }
    try {
      plans.back().entries.push_back(static_cast<CellIndex>(cell), units);
    } catch (const std::invalid_argument&) {
      fail("cell indices must ascend within a plan");
    }
  }
  return sets;
}

}  // namespace privcam
