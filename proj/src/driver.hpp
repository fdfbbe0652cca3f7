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

#ifndef PIPEPLAN_SRC_DRIVER_HPP_
#define PIPEPLAN_SRC_DRIVER_HPP_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bench.hpp"
#include "costmodel.hpp"
#include "executor.hpp"
#include "optimizer.hpp"
#include "spec_parser.hpp"
#include "synth.hpp"

namespace pipeplan {

// Everything the commands share.  opt_level: 0 runs the pipeline as
// written, 1 adds subexpression merging and cache planning, 2 adds
// operator implementation selection.
struct RunConfig {
  std::string spec_path;
  std::string cluster_path;
  double budget_bytes = 1e9;
  CachePolicy policy = CachePolicy::kGreedy;
  std::uint64_t seed = 0;
  int threads = 1;
  int opt_level = 2;
  bool tsv = false;
  std::string profile_in;   // reuse a saved profile instead of measuring
  std::string profile_out;  // save the profile used for planning
  std::string out_path;     // sink output (run)
  std::string trace_path;   // execution trace TSV (run)
  double admission_fraction = 0.3;
  bool fallback = true;  // mispredict fallback during run
  int profile_reps = 1;
  int optimal_guard = 16;  // exhaustive rows only at or below this size
};

// Output of the shared planning pass: parsed and merged graph, loaded
// data, profile, implementation choices, and the pinned cache set.
struct PreparedPipeline {
  PipelineGraph graph;  // after merging, when enabled
  std::map<NodeId, NodeId> remap;
  std::vector<std::pair<std::string, std::string>> merges;  // dropped, kept
  ClusterResourceDescriptor cluster;
  ImplMultipliers mult;
  DataBindings bindings;
  PlanMap plan;
  Profile profile;
  std::vector<std::pair<NodeId, PhysicalChoice>> choices;
  std::set<NodeId> pinned;
  std::vector<GreedyPick> picks;  // greedy selection order
  double predicted_sec = 0;       // per the configured policy
  double planning_sec = 0;        // parse + load + profile + plan
};

PreparedPipeline prepare_pipeline(const RunConfig& cfg);

// Rewrites a loaded profile's node ids to this graph's by matching node
// names; node ids are process-local, names are the stable identity.
Profile align_profile(const Profile& p, const PipelineGraph& g);

// Planning report: merges, per-node implementation candidates, the cache
// set with sizes and per-node savings, and the predicted runtime.
std::string cmd_explain(const RunConfig& cfg);

// Executes the pipeline and reports planning/execution time, cache use,
// and any warnings.  Writes sink output and trace when paths are set.
std::string cmd_run(const RunConfig& cfg);

struct BenchCacheConfig {
  std::vector<double> budgets;
  std::vector<CachePolicy> policies = {CachePolicy::kNone, CachePolicy::kRule,
                                       CachePolicy::kLru,
                                       CachePolicy::kGreedy};
  int trials = 0;  // measured executor runs per row; needs a pipeline file
};

// Policy x budget table of simulated (and optionally measured) runtimes,
// from either a pipeline file or a saved profile.
std::string cmd_bench_cache(const RunConfig& cfg, const BenchCacheConfig& bc);

struct SynthBenchConfig {
  SynthDagOptions dag;
  int instances = 1;
  // Budgets as fractions of the instance's total intermediate size.
  std::vector<double> budget_fracs = {0.25, 0.5, 1.0};
  std::vector<CachePolicy> policies = {CachePolicy::kNone, CachePolicy::kRule,
                                       CachePolicy::kLru,
                                       CachePolicy::kGreedy,
                                       CachePolicy::kOptimal};
};

// Same table over generated random DAG profiles.
std::string cmd_bench_synth(const RunConfig& cfg, const SynthBenchConfig& sc);

// Benchmarks this machine and writes a cluster descriptor with fitted
// multipliers; returns the fit log plus the descriptor text.
std::string cmd_calibrate(const RunConfig& cfg, const std::string& out_conf);

}  // namespace pipeplan

#endif  // PIPEPLAN_SRC_DRIVER_HPP_
