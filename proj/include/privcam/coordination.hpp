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

// Decentralized collective learning over a tree of camera agents.
//
// Each iteration runs a bottom-up pass (leaves first) in which every agent
// receives the proposed changes of its children's subtrees, approves the
// subset of them that best lowers the global squared error, picks its own
// plan against the resulting aggregate, and forwards its subtree change to
// its parent. The root's result is the new global aggregate; the top-down
// pass broadcasts it and rolls back every subtree whose change was
// rejected. Because the root may always reject everything and keep its own
// plan, the global error never increases.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "privcam/plangen.hpp"
#include "privcam/scenario.hpp"
#include "privcam/sparse.hpp"

namespace privcam {

// Dense aggregate G in coverage units (G_n = units[n] / units_per_cell).
struct Aggregate {
  int units_per_cell = 1;
  std::vector<Units> units;

  double value(std::size_t n) const {
    return static_cast<double>(units[n]) / units_per_cell;
  }
  std::vector<double> values() const;
  bool operator==(const Aggregate&) const = default;
};

// Target scaled to coverage units.
std::vector<Units> target_units(const TargetVector& target, int units_per_cell);

// sqrt(sum_n (G_n - T_n)^2 / N). Throws std::domain_error on a length
// mismatch.
double rmse_cost(std::span<const double> aggregate, const TargetVector& target);
double rmse_cost(const Aggregate& aggregate, const TargetVector& target);

// Exact sum of squared errors in units^2.
Units squared_error(const Aggregate& aggregate, const TargetVector& target);
double rmse_from_squared_error(Units sse, std::size_t cell_count, int units_per_cell);

// Sum of the selected plans; `choices[i]` indexes plan_sets[i].plans.
// Throws std::domain_error for a missing plan or a cell past cell_count.
Aggregate sum_selected(std::span<const PlanSet> plan_sets, std::span<const std::size_t> choices,
                       std::size_t cell_count);

class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Balanced tree stored level by level: node i has children
// arity*i + 1 .. arity*i + arity. Agents are mapped onto nodes by a seeded
// uniform permutation.
struct TreeTopology {
  int arity = 2;
  std::uint64_t seed = 0;
  std::vector<std::size_t> agent_at;  // node -> agent
  std::vector<std::size_t> node_of;   // agent -> node

  std::size_t size() const { return agent_at.size(); }
  bool is_root(std::size_t node) const { return node == 0; }
  std::size_t parent(std::size_t node) const { return (node - 1) / arity; }
  std::size_t first_child(std::size_t node) const { return arity * node + 1; }
  std::size_t child_count(std::size_t node) const;
  int depth() const;  // number of levels
};

TreeTopology build_tree(std::size_t agent_count, int arity, std::uint64_t seed);

struct AgentState {
  std::size_t camera_id = 0;
  std::size_t selected = 0;  // index into the agent's plan set
  std::size_t previous = 0;  // selection before the last iteration
  SparseVector subtree;      // sum of selected plans in the agent's subtree
};

struct IterationStats {
  Units squared_error = 0;
  std::size_t messages = 0;
  std::size_t bytes = 0;
  std::size_t rejected_subtrees = 0;
};

// Fresh agents with the given selections; subtree aggregates are derived
// from `topology`, and `aggregate` receives the global sum over
// `cell_count` cells.
std::vector<AgentState> init_agents(std::span<const PlanSet> plan_sets,
                                    std::span<const std::size_t> selections,
                                    const TreeTopology& topology, std::size_t cell_count,
                                    Aggregate& aggregate);

// One bottom-up/top-down iteration. Updates agents and `aggregate` in
// place; the new squared error never exceeds the old one. Throws
// InvariantViolation if the root aggregate disagrees with the recomputed
// sum of selected plans.
IterationStats run_iteration(std::vector<AgentState>& agents, std::span<const PlanSet> plan_sets,
                             const TreeTopology& topology, Aggregate& aggregate,
                             const TargetVector& target);

struct IterationRecord {
  int repetition = 0;
  int iteration = 0;  // 0 is the initial state
  double rmse = 0;
  Units squared_error = 0;
  std::size_t messages = 0;
  std::size_t bytes = 0;
};

struct RunOptions {
  int repetitions = 40;
  int iterations = 40;
  int arity = 2;
  std::uint64_t seed = 0;
  // Start from uniformly random plans (seeded) instead of plan 0.
  bool random_initial = false;
  int workers = 1;
};

struct RunResult {
  std::vector<std::vector<IterationRecord>> traces;  // per repetition
  std::size_t best_repetition = 0;
  std::vector<std::size_t> selections;  // per plan set, best repetition
  Aggregate aggregate;
  Units squared_error = 0;
  double rmse = 0;
  double seconds = 0;
};

// Repetition r uses a tree permuted with seed + r; the repetition with the
// lowest final error is kept (ties: lowest r).
RunResult run_collective_learning(std::span<const PlanSet> plan_sets, const TargetVector& target,
                                  const RunOptions& options);

// Generates plans in `mode` and runs the engine on them.
RunResult run(const Scenario& scenario, PlanMode mode, const RunOptions& options);

// CSV: repetition,iteration,rmse,sum_sq_err,messages,bytes
inline constexpr std::string_view kTraceCsvHeader =
    "repetition,iteration,rmse,sum_sq_err,messages,bytes";
std::string trace_csv(const RunResult& result, int units_per_cell);

}  // namespace privcam
