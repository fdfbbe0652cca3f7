/* Copyright 2026 The PipePlan Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef PIPEPLAN_OPTIMIZER_HPP_
#define PIPEPLAN_OPTIMIZER_HPP_

#include <map>
#include <set>
#include <vector>

#include "profiler.hpp"

namespace pipeplan {

// Demand-count accounting for one cache assignment.  demands(v) is how
// many times v's output is pulled; computes(v) how many times v actually
// runs (1 when cached and pulled at all).  Every compute of v scans each
// input weight(v) times.
struct SimCounts {
  double time = 0;  // seconds: sum over nodes of computes * weight * t
  std::map<NodeId, double> demands;
  std::map<NodeId, double> computes;
};

SimCounts simulate_counts(const Profile& p, const std::set<NodeId>& cached);

// Estimated end-to-end seconds for the given cache set.
double est_runtime(const Profile& p, const std::set<NodeId>& cached);

// Same quantity by a per-subtree recurrence instead of demand counting;
// kept as an independent cross-check of the algebra.
double est_runtime_recursive(const Profile& p, const std::set<NodeId>& cached);

// Bytes the assignment pins.
double cache_bytes(const Profile& p, const std::set<NodeId>& cached);

// Greedy assignment: repeatedly cache the node giving the largest
// runtime reduction, among nodes that still fit in the remaining budget;
// stops when no candidate strictly improves.  Ties prefer the smaller
// output, then the smaller id.
struct GreedyPick {
  NodeId id = 0;
  double saved_sec = 0.0;
  double bytes = 0.0;
};

std::set<NodeId> plan_greedy(const Profile& p, double budget_bytes,
                             std::vector<GreedyPick>* picks = nullptr);

// Exhaustive minimum over all subsets that fit (feasible only for small
// profiles; capped at 24 nodes).  Ties prefer fewer pinned bytes, then
// the lexicographically smallest id set.
std::set<NodeId> plan_optimal(const Profile& p, double budget_bytes);

// Baseline heuristic: pin fitted-model outputs in topological order
// while they fit.
std::set<NodeId> plan_rule(const Profile& p, double budget_bytes);

// Merges structurally identical nodes (same kind, canonical params, and
// slot-for-slot identical resolved inputs) bottom-up until fixpoint,
// keeping the smallest id of each class.  Display names do not affect
// equivalence.  remap, when given, receives old-id -> surviving-id.
PipelineGraph merge_common_subexpressions(const PipelineGraph& g,
                                          std::map<NodeId, NodeId>* remap);

}  // namespace pipeplan

#endif  // PIPEPLAN_OPTIMIZER_HPP_
