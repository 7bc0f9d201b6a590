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

#include "privcam/coordination.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

#include "privcam/random.hpp"

namespace privcam {

namespace {

// Wire size of a sparse vector message: entry count + (cell, value) pairs.
std::size_t message_bytes(const SparseVector& v) {
  return sizeof(std::uint32_t) + v.size() * (sizeof(CellIndex) + sizeof(Units));
}

// Above this arity, children are approved greedily instead of by trying
// every subset.
constexpr int kExhaustiveApprovalArity = 8;

std::string exact(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void check_plan_sets(std::span<const PlanSet> plan_sets) {
  for (const auto& ps : plan_sets) {
    if (ps.plans.empty()) throw NoFeasiblePlanError(ps.camera_id, 0.0);
  }
}

}  // namespace

std::vector<double> Aggregate::values() const {
  std::vector<double> out(units.size());
  for (std::size_t n = 0; n < units.size(); ++n) out[n] = value(n);
  return out;
}

std::vector<Units> target_units(const TargetVector& target, int units_per_cell) {
  std::vector<Units> out(target.size());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = Units{target[n]} * units_per_cell;
  return out;
}

double rmse_cost(std::span<const double> aggregate, const TargetVector& target) {
  if (aggregate.size() != target.size()) {
    throw std::domain_error("rmse_cost: aggregate and target lengths differ");
  }
  if (aggregate.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t n = 0; n < aggregate.size(); ++n) {
    const double d = aggregate[n] - target[n];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(aggregate.size()));
}

double rmse_cost(const Aggregate& aggregate, const TargetVector& target) {
  if (aggregate.units.size() != target.size()) {
    throw std::domain_error("rmse_cost: aggregate and target lengths differ");
  }
  return rmse_from_squared_error(squared_error(aggregate, target), target.size(),
                                 aggregate.units_per_cell);
}

Units squared_error(const Aggregate& aggregate, const TargetVector& target) {
  if (aggregate.units.size() != target.size()) {
    throw std::domain_error("squared_error: aggregate and target lengths differ");
  }
  Units sum = 0;
  for (std::size_t n = 0; n < target.size(); ++n) {
    const Units d = aggregate.units[n] - Units{target[n]} * aggregate.units_per_cell;
    sum += d * d;
  }
  return sum;
}

double rmse_from_squared_error(Units sse, std::size_t cell_count, int units_per_cell) {
  if (cell_count == 0) return 0.0;
  const double q = units_per_cell;
  return std::sqrt(static_cast<double>(sse) / (q * q) / static_cast<double>(cell_count));
}

Aggregate sum_selected(std::span<const PlanSet> plan_sets, std::span<const std::size_t> choices,
                       std::size_t cell_count) {
  if (choices.size() != plan_sets.size()) {
    throw std::domain_error("one choice per plan set is required");
  }
  Aggregate g;
  g.units_per_cell = plan_sets.empty() ? 1 : plan_sets.front().units_per_cell;
  g.units.assign(cell_count, 0);
  for (std::size_t i = 0; i < plan_sets.size(); ++i) {
    if (choices[i] >= plan_sets[i].plans.size()) {
      throw std::domain_error("camera " + std::to_string(plan_sets[i].camera_id) +
                              ": selected plan " + std::to_string(choices[i]) +
                              " does not exist");
    }
    const SparseVector& e = plan_sets[i].plans[choices[i]].entries;
    if (!e.empty() && e.entries().back().cell >= cell_count) {
      throw std::domain_error("camera " + std::to_string(plan_sets[i].camera_id) +
                              ": plan covers a cell past the map");
    }
    e.scatter_into(g.units);
  }
  return g;
}

std::size_t TreeTopology::child_count(std::size_t node) const {
  const std::size_t first = first_child(node);
  if (first >= size()) return 0;
  return std::min<std::size_t>(arity, size() - first);
}

int TreeTopology::depth() const {
  if (agent_at.empty()) return 0;
  int levels = 1;
  for (std::size_t node = size() - 1; node != 0; node = parent(node)) ++levels;
  return levels;
}

TreeTopology build_tree(std::size_t agent_count, int arity, std::uint64_t seed) {
  if (arity < 1) throw std::domain_error("tree arity must be >= 1");
  TreeTopology t;
  t.arity = arity;
  t.seed = seed;
  Rng rng(seed);
  t.agent_at = random_permutation(rng, agent_count);
  t.node_of.resize(agent_count);
  for (std::size_t node = 0; node < agent_count; ++node) t.node_of[t.agent_at[node]] = node;
  return t;
}

std::vector<AgentState> init_agents(std::span<const PlanSet> plan_sets,
                                    std::span<const std::size_t> selections,
                                    const TreeTopology& topology, std::size_t cell_count,
                                    Aggregate& aggregate) {
  if (topology.size() != plan_sets.size()) {
    throw std::domain_error("tree size differs from the number of plan sets");
  }
  aggregate = sum_selected(plan_sets, selections, cell_count);
  std::vector<AgentState> agents(plan_sets.size());
  for (std::size_t a = 0; a < agents.size(); ++a) {
    agents[a].camera_id = plan_sets[a].camera_id;
    agents[a].selected = selections[a];
    agents[a].previous = selections[a];
  }
  for (std::size_t node = topology.size(); node-- > 0;) {
    auto& agent = agents[topology.agent_at[node]];
    SparseVector subtree = plan_sets[topology.agent_at[node]].plans[agent.selected].entries;
    const std::size_t first = topology.first_child(node);
    for (std::size_t c = 0; c < topology.child_count(node); ++c) {
      subtree += agents[topology.agent_at[first + c]].subtree;
    }
    agent.subtree = std::move(subtree);
  }
  return agents;
}

IterationStats run_iteration(std::vector<AgentState>& agents, std::span<const PlanSet> plan_sets,
                             const TreeTopology& topology, Aggregate& aggregate,
                             const TargetVector& target) {
  const std::size_t U = topology.size();
  IterationStats stats;
  if (U == 0) {
    stats.squared_error = squared_error(aggregate, target);
    return stats;
  }
  const std::vector<Units> T = target_units(target, aggregate.units_per_cell);
  const std::vector<Units>& G = aggregate.units;
  std::vector<Units> work = G;

  std::vector<SparseVector> proposal(U);         // per node: subtree change
  std::vector<std::size_t> proposed(U);          // per node: own plan choice
  std::vector<std::uint8_t> approved(U, 1);      // per node: accepted by parent

  // Bottom-up: children have larger node indices than their parents.
  for (std::size_t node = U; node-- > 0;) {
    const std::size_t a = topology.agent_at[node];
    const AgentState& agent = agents[a];
    const auto& plans = plan_sets[a].plans;
    const std::size_t first = topology.first_child(node);
    const std::size_t nchild = topology.child_count(node);

    SparseVector accepted;
    if (nchild > 0) {
      if (topology.arity <= kExhaustiveApprovalArity) {
        // Subsets from "approve all" down to "reject all"; strict
        // improvement is needed to move further down the list.
        const unsigned full = (1u << nchild) - 1u;
        Units best_delta = std::numeric_limits<Units>::max();
        unsigned best_mask = full;
        SparseVector best_sum;
        for (unsigned mask = full + 1; mask-- > 0;) {
          SparseVector sum;
          for (std::size_t c = 0; c < nchild; ++c) {
            if (mask & (1u << c)) sum += proposal[first + c];
          }
          const Units delta = squared_error_delta(G, T, sum);
          if (delta < best_delta) {
            best_delta = delta;
            best_mask = mask;
            best_sum = std::move(sum);
          }
        }
        for (std::size_t c = 0; c < nchild; ++c) {
          approved[first + c] = (best_mask >> c) & 1u;
        }
        accepted = std::move(best_sum);
      } else {
        Units current = 0;
        for (std::size_t c = 0; c < nchild; ++c) {
          SparseVector trial = accepted + proposal[first + c];
          const Units delta = squared_error_delta(G, T, trial);
          approved[first + c] = delta <= current;
          if (approved[first + c]) {
            current = delta;
            accepted = std::move(trial);
          }
        }
      }
    }

    // Own choice against G_prev + accepted child changes - own stale plan.
    const SparseVector& stale = plans[agent.selected].entries;
    accepted.scatter_into(work, 1);
    stale.scatter_into(work, -1);
    std::size_t choice = agent.selected;
    Units best_cost = squared_error_delta(work, T, stale);
    for (std::size_t k = 0; k < plans.size(); ++k) {
      if (k == agent.selected) continue;
      const Units cost = squared_error_delta(work, T, plans[k].entries);
      if (cost < best_cost) {
        best_cost = cost;
        choice = k;
      }
    }
    stale.scatter_into(work, 1);
    accepted.scatter_into(work, -1);

    proposed[node] = choice;
    if (choice != agent.selected) {
      accepted += plans[choice].entries;
      accepted -= stale;
    }
    proposal[node] = std::move(accepted);
  }

  // Top-down: broadcast the new aggregate and roll back rejected subtrees.
  const SparseVector& global_change = proposal[0];
  std::vector<std::uint8_t> effective(U, 0);
  for (std::size_t node = 0; node < U; ++node) {
    effective[node] = topology.is_root(node)
                          ? 1
                          : (effective[topology.parent(node)] && approved[node]);
    AgentState& agent = agents[topology.agent_at[node]];
    agent.previous = agent.selected;
    if (effective[node]) {
      agent.selected = proposed[node];
      agent.subtree += proposal[node];
    } else if (!topology.is_root(node) && effective[topology.parent(node)]) {
      ++stats.rejected_subtrees;
    }
  }
  global_change.scatter_into(aggregate.units, 1);

  std::vector<std::size_t> choices(agents.size());
  for (std::size_t a = 0; a < agents.size(); ++a) choices[a] = agents[a].selected;
  const Aggregate recomputed = sum_selected(plan_sets, choices, aggregate.units.size());
  if (recomputed.units != aggregate.units ||
      SparseVector::from_dense(recomputed.units) != agents[topology.agent_at[0]].subtree) {
    throw InvariantViolation("root aggregate disagrees with the sum of selected plans");
  }

  stats.squared_error = squared_error(aggregate, target);
  stats.messages = 2 * (U - 1);
  for (std::size_t node = 1; node < U; ++node) stats.bytes += message_bytes(proposal[node]);
  stats.bytes += (U - 1) * (1 + message_bytes(global_change));
  return stats;
}

namespace {

struct RepetitionOutcome {
  std::vector<IterationRecord> trace;
  std::vector<std::size_t> selections;
  Aggregate aggregate;
  Units squared_error = 0;
};

RepetitionOutcome run_repetition(std::span<const PlanSet> plan_sets, const TargetVector& target,
                                 const RunOptions& options, int repetition) {
  const std::uint64_t seed = options.seed + static_cast<std::uint64_t>(repetition);
  const TreeTopology tree = build_tree(plan_sets.size(), options.arity, seed);
  const int q = plan_sets.empty() ? 1 : plan_sets.front().units_per_cell;

  std::vector<std::size_t> initial(plan_sets.size(), 0);
  if (options.random_initial) {
    Rng rng(mix_seed(seed));
    for (std::size_t i = 0; i < initial.size(); ++i) {
      initial[i] = uniform_index(rng, plan_sets[i].plans.size());
    }
  }

  RepetitionOutcome out;
  auto agents = init_agents(plan_sets, initial, tree, target.size(), out.aggregate);

  Units sse = squared_error(out.aggregate, target);
  out.trace.push_back(
      {repetition, 0, rmse_from_squared_error(sse, target.size(), q), sse, 0, 0});
  for (int it = 1; it <= options.iterations; ++it) {
    const IterationStats stats = run_iteration(agents, plan_sets, tree, out.aggregate, target);
    if (stats.squared_error > sse) {
      throw InvariantViolation("squared error increased in repetition " +
                               std::to_string(repetition) + ", iteration " + std::to_string(it));
    }
    sse = stats.squared_error;
    out.trace.push_back({repetition, it, rmse_from_squared_error(sse, target.size(), q), sse,
                         stats.messages, stats.bytes});
  }
  out.squared_error = sse;
  out.selections.resize(agents.size());
  for (std::size_t a = 0; a < agents.size(); ++a) out.selections[a] = agents[a].selected;
  return out;
}

}  // namespace

RunResult run_collective_learning(std::span<const PlanSet> plan_sets, const TargetVector& target,
                                  const RunOptions& options) {
  if (options.repetitions < 1 || options.iterations < 1) {
    throw std::domain_error("repetitions and iterations must be >= 1");
  }
  check_plan_sets(plan_sets);
  for (const auto& ps : plan_sets) {
    for (const auto& p : ps.plans) {
      if (!p.entries.empty() && p.entries.entries().back().cell >= target.size()) {
        throw std::domain_error("plan covers a cell outside the target");
      }
    }
  }
  const auto start = std::chrono::steady_clock::now();

  const auto R = static_cast<std::size_t>(options.repetitions);
  std::vector<RepetitionOutcome> outcomes(R);
  std::vector<std::exception_ptr> errors(R);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < R; r = next++) {
      try {
        outcomes[r] = run_repetition(plan_sets, target, options, static_cast<int>(r));
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(options.workers, 1, options.repetitions);
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  RunResult result;
  for (std::size_t r = 0; r < R; ++r) {
    if (outcomes[r].squared_error < outcomes[result.best_repetition].squared_error) {
      result.best_repetition = r;
    }
  }
  auto& best = outcomes[result.best_repetition];
  result.selections = best.selections;
  result.aggregate = best.aggregate;
  result.squared_error = best.squared_error;
  result.rmse = rmse_from_squared_error(best.squared_error, target.size(),
                                        best.aggregate.units_per_cell);
  for (auto& o : outcomes) result.traces.push_back(std::move(o.trace));
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

RunResult run(const Scenario& scenario, PlanMode mode, const RunOptions& options) {
  PlanGenerationOptions gen;
  gen.mode = mode;
  gen.workers = options.workers;
  const PlanGeneration plans = generate_all_plans(scenario, gen);
  return run_collective_learning(plans.plan_sets, scenario.target, options);
}

std::string trace_csv(const RunResult& result, int units_per_cell) {
  std::ostringstream out;
  out << kTraceCsvHeader << '\n';
  const double q2 = static_cast<double>(units_per_cell) * units_per_cell;
  for (const auto& trace : result.traces) {
    for (const auto& rec : trace) {
      out << rec.repetition << ',' << rec.iteration << ',' << exact(rec.rmse) << ','
          << exact(static_cast<double>(rec.squared_error) / q2) << ',' << rec.messages << ','
          << rec.bytes << '\n';
    }
  }
  return out.str();
}

}  // namespace privcam
