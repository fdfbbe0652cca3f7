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

#ifndef PIPEPLAN_EXECUTOR_HPP_
#define PIPEPLAN_EXECUTOR_HPP_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "profiler.hpp"

namespace pipeplan {

enum class CachePolicy { kNone, kGreedy, kRule, kOptimal, kLru };

const char* cache_policy_name(CachePolicy p);
bool parse_cache_policy(const std::string& s, CachePolicy* out);

struct ExecOptions {
  double budget_bytes = 1e9;
  // Planned nodes to pin.  The demand-driven walk computes each at most
  // once and holds it for the whole run.
  std::set<NodeId> pinned;
  // When true, unpinned results may enter the store under an LRU regime,
  // subject to the admission cap below.
  bool lru_admission = false;
  double admission_fraction = 0.3;  // of budget, per single value
  // Mispredict fallback: when a node's first computation overruns its
  // prediction by more than fallback_ratio (and the prediction was at
  // least fallback_min_sec), open LRU admission for the rest of the run.
  bool enable_fallback = false;
  double fallback_ratio = 2.0;
  double fallback_min_sec = 0.05;
};

struct NodeTraceEntry {
  NodeId id = 0;
  std::string name;
  std::uint64_t demands = 0;   // pulls of this node's output
  std::uint64_t computes = 0;  // times the operator actually ran
  double predicted_sec = 0;    // profile estimate for one computation
  double measured_sec = 0;     // wall seconds across all computations
  std::uint64_t bytes = 0;     // output footprint
  bool pinned = false;
};

struct ExecResult {
  ValuePtr sink_value;
  double wall_sec = 0;
  std::vector<NodeTraceEntry> trace;  // ascending node id
  double peak_cache_bytes = 0;
  bool fallback_triggered = false;
  std::vector<std::string> warnings;
};

// Runs the pipeline demand-first from the sink.  A node of weight w
// pulls each input w times per computation; uncached inputs recompute on
// every pull, which is exactly what the runtime estimate models.
// profile supplies per-node predictions (pass nullptr to disable
// prediction-dependent behavior, including fallback).
ExecResult execute_pipeline(const PipelineGraph& g, const PlanMap& plan,
                            const Profile* profile, const OpContext& ctx,
                            const ExecOptions& opts);

}  // namespace pipeplan

#endif  // PIPEPLAN_EXECUTOR_HPP_
