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

#ifndef PIPEPLAN_SRC_BENCH_HPP_
#define PIPEPLAN_SRC_BENCH_HPP_

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "executor.hpp"
#include "optimizer.hpp"
#include "profiler.hpp"

namespace pipeplan {

// Replay of the executor's demand-driven walk against profile numbers only,
// with the same budgeted store, admission threshold, and LRU eviction order
// the executor uses.  Compute counts therefore predict a real admission-cached
// run exactly whenever profiled byte sizes match the real output sizes.
struct LruSim {
  double time_sec = 0;
  double peak_bytes = 0;
  std::map<NodeId, std::uint64_t> demands;
  std::map<NodeId, std::uint64_t> computes;
};

LruSim simulate_lru(const Profile& p, double budget_bytes,
                    double admission_fraction);

// One line of a policy x budget benchmark table.  measured_sec stays NaN for
// purely simulated rows; cached_nodes is -1 when the policy has no fixed
// cache set (admission caching picks entries as it goes).
struct BenchRow {
  CachePolicy policy = CachePolicy::kNone;
  double budget = 0;
  double sim_sec = 0;
  double cached_bytes = 0;
  int cached_nodes = -1;
  double measured_sec = std::numeric_limits<double>::quiet_NaN();
};

// Simulated runtime per (policy, budget).  Rows for the exhaustive policy are
// emitted only when the profile has at most optimal_guard nodes.
std::vector<BenchRow> bench_cache_table(const Profile& p,
                                        const std::vector<double>& budgets,
                                        const std::vector<CachePolicy>& policies,
                                        double admission_fraction,
                                        int optimal_guard = 16);

}  // namespace pipeplan

#endif  // PIPEPLAN_SRC_BENCH_HPP_
