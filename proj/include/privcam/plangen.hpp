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

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "privcam/geometry.hpp"
#include "privcam/scenario.hpp"
#include "privcam/sparse.hpp"

namespace privcam {

enum class PlanMode { kUnconstrained, kHardConstrained };

std::string_view to_string(PlanMode mode);

// One candidate orientation of one camera. `entries` holds covered-sample
// counts; divide by units_per_cell for coverage ratios.
struct Plan {
  std::size_t camera_id = 0;
  int plan_index = 0;          // k in 1..K
  double orientation_deg = 0;  // k * 360 / K
  SparseVector entries;

  Units mass() const { return entries.sum(); }
  bool operator==(const Plan&) const = default;
};

struct PlanSet {
  std::size_t camera_id = 0;
  std::vector<Plan> plans;
  PlanMode mode = PlanMode::kUnconstrained;
  int units_per_cell = kDefaultSampleDensity * kDefaultSampleDensity;

  bool operator==(const PlanSet&) const = default;
};

class NoFeasiblePlanError : public std::runtime_error {
 public:
  NoFeasiblePlanError(std::size_t camera_id, double threshold);
  std::size_t camera_id() const { return camera_id_; }

 private:
  std::size_t camera_id_;
};

// Covered mass on cells with T_n = 0, i.e. sum_n p_ukn (1 - T_n), in units.
Units private_mass(const SparseVector& entries, const TargetVector& target);

// True iff a plan with this private mass survives threshold V. Plans with
// zero private mass always survive, so V = 0 means strict exclusion.
bool within_threshold(Units private_units, double threshold, int units_per_cell);

// Candidate orientations k * 360 / K for k = 1..K; a plan is kept iff it
// covers some cell and, in hard-constrained mode, its private mass is
// below V. Throws NoFeasiblePlanError when hard-constrained filtering
// leaves nothing, and std::domain_error for K < 1 or V < 0.
PlanSet generate_plans(const CameraSpec& spec, int plan_count, const GridMap& map,
                       const TargetVector& target, double threshold, PlanMode mode,
                       int sample_density = kDefaultSampleDensity);

enum class InfeasiblePolicy {
  kError,  // stop with NoFeasiblePlanError
  kIdle,   // the camera operates without a plan and is left out
};

struct PlanGenerationOptions {
  PlanMode mode = PlanMode::kHardConstrained;
  int max_relaxations = 3;  // threshold doublings before giving up
  InfeasiblePolicy on_infeasible = InfeasiblePolicy::kError;
  int workers = 1;
};

struct RelaxationEvent {
  std::size_t camera_id = 0;
  double from_threshold = 0;
  double to_threshold = 0;
};

struct PlanGeneration {
  std::vector<PlanSet> plan_sets;  // one per operating camera, by camera id
  std::vector<RelaxationEvent> relaxations;
  std::vector<std::size_t> idle_cameras;
  std::size_t camera_count = 0;
};

// Plan sets for every camera of a scenario. In hard-constrained mode a
// camera without feasible plans is retried with V doubled, up to
// max_relaxations times, before on_infeasible applies.
PlanGeneration generate_all_plans(const Scenario& scenario, const PlanGenerationOptions& options);

// Dataset CSV: camera_id,plan_index,orientation_deg,cell_index,ratio with
// one row per nonzero cell, ordered by camera, plan and cell.
inline constexpr std::string_view kPlanCsvHeader =
    "camera_id,plan_index,orientation_deg,cell_index,ratio";
void export_plans(std::span<const PlanSet> plan_sets, std::ostream& out);
// Inverse of export_plans. Ratios are mapped back to sample counts, so the
// sample density used at generation must be supplied. Throws
// std::runtime_error with a line number on malformed input.
std::vector<PlanSet> import_plans(std::istream& in, int sample_density, PlanMode mode);

}  // namespace privcam
