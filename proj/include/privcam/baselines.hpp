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

// Centralized comparison methods. All of them take the plan sets of the
// operating cameras and return one plan per set.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "privcam/coordination.hpp"
#include "privcam/plangen.hpp"
#include "privcam/scenario.hpp"

namespace privcam {

struct Selection {
  std::string method;
  std::vector<std::size_t> camera_ids;  // parallel to choices
  std::vector<std::size_t> choices;     // index into each plan set
  Aggregate aggregate;
  Units squared_error = 0;

  double rmse() const {
    return rmse_from_squared_error(squared_error, aggregate.units.size(),
                                   aggregate.units_per_cell);
  }
};

// Fills aggregate and squared_error from `choices`.
Selection make_selection(std::string method, std::span<const PlanSet> plan_sets,
                         std::vector<std::size_t> choices, const TargetVector& target);

// Two-stage grid voting. A cell's preference is 1 - min(G_n, 1) on
// eligible cells and 0 elsewhere; with `privacy_aware`, cells with T_n = 0
// are ineligible, otherwise only obstacle cells are. The highest-scoring
// unassigned camera commits its best plan, then everything is rescored.
// Ties: lowest camera, then lowest plan index.
Selection ggv_select(const Scenario& scenario, std::span<const PlanSet> plan_sets,
                     bool privacy_aware);

// Cameras in raster order of their location cell (row 0 first), each
// taking the plan with the largest newly covered required mass. Ties:
// lowest plan index.
Selection greedy_raster_select(const Scenario& scenario, std::span<const PlanSet> plan_sets);

class BudgetExceededError : public std::runtime_error {
 public:
  explicit BudgetExceededError(const std::string& combinations)
      : std::runtime_error("exhaustive search refused: " + combinations +
                           " plan combinations exceed the budget"),
        combinations_(combinations) {}
  const std::string& combinations() const { return combinations_; }

 private:
  std::string combinations_;
};

inline constexpr std::uint64_t kDefaultExhaustiveBudget = 10'000'000;

// Exact minimum of the squared error over all combinations; the
// lexicographically smallest choice vector wins ties.
Selection exhaustive_select(const Scenario& scenario, std::span<const PlanSet> plan_sets,
                            std::uint64_t budget = kDefaultExhaustiveBudget);
Selection exhaustive_select(std::span<const PlanSet> plan_sets, const TargetVector& target,
                            std::uint64_t budget = kDefaultExhaustiveBudget);

// Steepest single-camera descent from `restarts` seeded random starts;
// the best local minimum is kept (ties: earliest restart).
Selection hillclimb_select(const Scenario& scenario, std::span<const PlanSet> plan_sets,
                           int restarts = 20, std::uint64_t seed = 0);
Selection hillclimb_select(std::span<const PlanSet> plan_sets, const TargetVector& target,
                           int restarts = 20, std::uint64_t seed = 0);

}  // namespace privcam
