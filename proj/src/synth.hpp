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

#ifndef PIPEPLAN_SRC_SYNTH_HPP_
#define PIPEPLAN_SRC_SYNTH_HPP_

#include <cstdint>
#include <vector>

#include "graph.hpp"
#include "matrix.hpp"
#include "ops.hpp"
#include "profiler.hpp"
#include "values.hpp"

namespace pipeplan {

// Seeded dataset generators used by calibration, benchmarks, and tests.
Mat random_dense(std::size_t n, std::size_t d, std::uint64_t seed);
SparseData random_sparse(std::size_t n, std::size_t d, double density,
                         std::uint64_t seed);
ImageData random_images(std::size_t count, std::size_t side, std::size_t chan,
                        std::uint64_t seed);

// Random cache-planning instances: a connected DAG profile with a chain
// backbone, extra reuse edges, mixed iteration weights, and lognormal
// per-node time and size.  A fraction of nodes is marked as estimator
// output so the rule-based planner has something to pin.
struct SynthDagOptions {
  int nodes = 10;
  double reuse_p = 0.4;
  std::vector<int> weights = {1, 5, 20};
  double t_mu = -3.0;
  double t_sigma = 1.2;
  double size_mu = 13.8;  // ~1e6 bytes
  double size_sigma = 1.0;
  double estimator_p = 0.2;
};

Profile synth_profile(const SynthDagOptions& opt, std::uint64_t seed);

// Sum of out_bytes over all nodes; the budget scale the cache benchmarks
// sweep against.  At a budget this large every node fits, so greedy and
// the exhaustive search both reach the single-compute floor.
double total_intermediate_bytes(const Profile& p);

// Fixed workload on which admission caching loses ground as its budget
// grows: two reused values, each sharing its segments with a flood of
// single-use intermediates sized so that a bigger budget admits a bigger
// flood, which then evicts the reused value between uses.
Profile lru_pathology_profile();

// Small executable pipeline over dense maps, gathers, and an occasional
// least-squares fit/apply pair.  Every intermediate has fixed-width
// records, so profiled sizes are exact and simulated compute counts can
// be compared one-to-one with execution traces.
PipelineGraph synth_real_pipeline(std::uint64_t seed);

// Chain of per-record dense maps for profiler accuracy checks: n records
// of width d through `depth` maps, each with `repeat` internal sweeps to
// give the timer something to measure.
PipelineGraph synth_map_pipeline(std::size_t n, std::size_t d, int depth,
                                 int repeat, std::uint64_t seed);

}  // namespace pipeplan

#endif  // PIPEPLAN_SRC_SYNTH_HPP_
