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

#include "privcam/baselines.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "privcam/random.hpp"

namespace privcam {

namespace {

int units_per_cell(std::span<const PlanSet> plan_sets, int fallback) {
  return plan_sets.empty() ? fallback : plan_sets.front().units_per_cell;
}

void require_plans(std::span<const PlanSet> plan_sets) {
  for (const auto& ps : plan_sets) {
    if (ps.plans.empty()) throw NoFeasiblePlanError(ps.camera_id, 0.0);
  }
}

const CameraSpec& camera_by_id(const Scenario& scenario, std::size_t id) {
  for (const auto& cam : scenario.cameras) {
    if (cam.id == id) return cam;
  }
  throw std::domain_error("no camera with id " + std::to_string(id));
}

}  // namespace

Selection make_selection(std::string method, std::span<const PlanSet> plan_sets,
                         std::vector<std::size_t> choices, const TargetVector& target) {
  Selection s;
  s.method = std::move(method);
  for (const auto& ps : plan_sets) s.camera_ids.push_back(ps.camera_id);
  s.aggregate = sum_selected(plan_sets, choices, target.size());
  s.aggregate.units_per_cell = units_per_cell(plan_sets, s.aggregate.units_per_cell);
  s.choices = std::move(choices);
  s.squared_error = squared_error(s.aggregate, target);
  return s;
}

Selection ggv_select(const Scenario& scenario, std::span<const PlanSet> plan_sets,
                     bool privacy_aware) {
  require_plans(plan_sets);
  const int q = units_per_cell(plan_sets, scenario.units_per_cell());
  const std::size_t N = scenario.target.size();
  std::vector<std::uint8_t> eligible(N);
  for (std::size_t n = 0; n < N; ++n) {
    eligible[n] = privacy_aware ? scenario.target[n] == 1 : !scenario.map.is_obstacle(n);
  }

  std::vector<Units> covered(N, 0);
  std::vector<std::size_t> choices(plan_sets.size(), 0);
  std::vector<std::uint8_t> assigned(plan_sets.size(), 0);
  for (std::size_t round = 0; round < plan_sets.size(); ++round) {
    std::size_t best_cam = plan_sets.size();
    std::size_t best_plan = 0;
    Units best_score = -1;
    for (std::size_t u = 0; u < plan_sets.size(); ++u) {
      if (assigned[u]) continue;
      const auto& plans = plan_sets[u].plans;
      for (std::size_t k = 0; k < plans.size(); ++k) {
        Units score = 0;
        for (const auto& e : plans[k].entries) {
          if (eligible[e.cell]) score += e.value * std::max<Units>(0, q - covered[e.cell]);
        }
        if (score > best_score) {
          best_score = score;
          best_cam = u;
          best_plan = k;
        }
      }
    }
    assigned[best_cam] = 1;
    choices[best_cam] = best_plan;
    plan_sets[best_cam].plans[best_plan].entries.scatter_into(covered);
  }
  return make_selection(privacy_aware ? "ggv-private" : "ggv", plan_sets, std::move(choices),
                        scenario.target);
}

Selection greedy_raster_select(const Scenario& scenario, std::span<const PlanSet> plan_sets) {
  require_plans(plan_sets);
  const int q = units_per_cell(plan_sets, scenario.units_per_cell());
  std::vector<std::size_t> order(plan_sets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::size_t> cell_of(plan_sets.size());
  for (std::size_t u = 0; u < plan_sets.size(); ++u) {
    const CellCoord c = scenario.map.cell_of(camera_by_id(scenario, plan_sets[u].camera_id).location);
    cell_of[u] = scenario.map.index(c.row, c.col);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::pair(cell_of[a], plan_sets[a].camera_id) <
           std::pair(cell_of[b], plan_sets[b].camera_id);
  });

  std::vector<Units> G(scenario.target.size(), 0);
  std::vector<std::size_t> choices(plan_sets.size(), 0);
  for (std::size_t u : order) {
    const auto& plans = plan_sets[u].plans;
    Units best_gain = -1;
    for (std::size_t k = 0; k < plans.size(); ++k) {
      Units gain = 0;
      for (const auto& e : plans[k].entries) {
        if (scenario.target[e.cell] != 1) continue;
        gain += std::min<Units>(G[e.cell] + e.value, q) - std::min<Units>(G[e.cell], q);
      }
      if (gain > best_gain) {
        best_gain = gain;
        choices[u] = k;
      }
    }
    plans[choices[u]].entries.scatter_into(G);
  }
  return make_selection("greedy", plan_sets, std::move(choices), scenario.target);
}

Selection exhaustive_select(const Scenario& scenario, std::span<const PlanSet> plan_sets,
                            std::uint64_t budget) {
  return exhaustive_select(plan_sets, scenario.target, budget);
}

Selection exhaustive_select(std::span<const PlanSet> plan_sets, const TargetVector& target,
                            std::uint64_t budget) {
  require_plans(plan_sets);
  std::uint64_t combos = 1;
  bool overflow = false;
  for (const auto& ps : plan_sets) {
    if (combos > std::numeric_limits<std::uint64_t>::max() / ps.plans.size()) {
      overflow = true;
      break;
    }
    combos *= ps.plans.size();
  }
  if (overflow) throw BudgetExceededError("more than 18446744073709551615");
  if (combos > budget) throw BudgetExceededError(std::to_string(combos));

  const int q = units_per_cell(plan_sets, 1);
  const std::vector<Units> T = target_units(target, q);
  std::vector<Units> G(target.size(), 0);
  const std::size_t U = plan_sets.size();
  std::vector<std::size_t> current(U, 0), best(U, 0);
  Units base = 0;
  for (Units t : T) base += t * t;
  Units best_cost = std::numeric_limits<Units>::max();

  // Depth-first in lexicographic order; only strict improvements replace
  // the incumbent.
  auto dfs = [&](auto&& self, std::size_t u, Units cost) -> void {
    if (u == U) {
      if (cost < best_cost) {
        best_cost = cost;
        best = current;
      }
      return;
    }
    const auto& plans = plan_sets[u].plans;
    for (std::size_t k = 0; k < plans.size(); ++k) {
      const SparseVector& p = plans[k].entries;
      const Units delta = squared_error_delta(G, T, p);
      p.scatter_into(G, 1);
      current[u] = k;
      self(self, u + 1, cost + delta);
      p.scatter_into(G, -1);
    }
  };
  dfs(dfs, 0, base);
  return make_selection("exhaustive", plan_sets, std::move(best), target);
}

Selection hillclimb_select(const Scenario& scenario, std::span<const PlanSet> plan_sets,
                           int restarts, std::uint64_t seed) {
  return hillclimb_select(plan_sets, scenario.target, restarts, seed);
}

Selection hillclimb_select(std::span<const PlanSet> plan_sets, const TargetVector& target,
                           int restarts, std::uint64_t seed) {
  if (restarts < 1) throw std::domain_error("hill-climb restarts must be >= 1");
  require_plans(plan_sets);
  const int q = units_per_cell(plan_sets, 1);
  const std::vector<Units> T = target_units(target, q);
  const std::size_t U = plan_sets.size();

  std::vector<std::size_t> best_choices;
  Units best_sse = std::numeric_limits<Units>::max();
  for (int r = 0; r < restarts; ++r) {
    Rng rng(mix_seed(seed + static_cast<std::uint64_t>(r)));
    std::vector<std::size_t> choices(U);
    for (std::size_t u = 0; u < U; ++u) choices[u] = uniform_index(rng, plan_sets[u].plans.size());
    std::vector<Units> G = sum_selected(plan_sets, choices, target.size()).units;

    for (;;) {
      Units best_delta = 0;
      std::size_t move_cam = U, move_plan = 0;
      for (std::size_t u = 0; u < U; ++u) {
        const auto& plans = plan_sets[u].plans;
        const SparseVector& cur = plans[choices[u]].entries;
        cur.scatter_into(G, -1);
        const Units keep = squared_error_delta(G, T, cur);
        for (std::size_t k = 0; k < plans.size(); ++k) {
          if (k == choices[u]) continue;
          const Units delta = squared_error_delta(G, T, plans[k].entries) - keep;
          if (delta < best_delta) {
            best_delta = delta;
            move_cam = u;
            move_plan = k;
          }
        }
        cur.scatter_into(G, 1);
      }
      if (move_cam == U) break;
      plan_sets[move_cam].plans[choices[move_cam]].entries.scatter_into(G, -1);
      choices[move_cam] = move_plan;
      plan_sets[move_cam].plans[move_plan].entries.scatter_into(G, 1);
    }

    Units sse = 0;
    for (std::size_t n = 0; n < G.size(); ++n) sse += (G[n] - T[n]) * (G[n] - T[n]);
    if (sse < best_sse) {
      best_sse = sse;
      best_choices = choices;
    }
  }
  return make_selection("hillclimb", plan_sets, std::move(best_choices), target);
}

}  // namespace privcam
