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

#include "bench.hpp"

#include <algorithm>
#include <unordered_map>

#include "common.hpp"

namespace pipeplan {

namespace {

constexpr std::uint64_t kMaxReplayEvents = 50'000'000;

// Dense mirror of the executor walk.  Store state is (membership, touch
// order); eviction removes the stalest entry first, exactly like the real
// store.  Weight loops fast-forward once two consecutive passes leave the
// store in the same order, since a pass is a pure function of store state.
struct Replay {
  std::vector<NodeId> ids;
  std::unordered_map<NodeId, int> index;
  std::vector<int> weight;
  std::vector<double> t_pass;
  std::vector<double> bytes;
  std::vector<std::vector<int>> ins;
  int sink = -1;

  double budget;
  double cap;  // admission threshold in bytes
  std::vector<char> in_store;
  std::vector<std::uint64_t> touch;
  std::uint64_t clock = 0;
  double used = 0;
  double peak = 0;

  std::vector<std::uint64_t> demands;
  std::vector<std::uint64_t> computes;
  double time = 0;
  std::uint64_t events = 0;

  Replay(const Profile& p, double budget_bytes, double admission_fraction)
      : budget(budget_bytes), cap(admission_fraction * budget_bytes) {
    for (const auto& n : p.nodes) {
      index[n.id] = static_cast<int>(ids.size());
      ids.push_back(n.id);
      weight.push_back(n.weight);
      t_pass.push_back(n.t_sec);
      bytes.push_back(n.out_bytes);
    }
    for (const auto& n : p.nodes) {
      std::vector<int> slots;
      for (NodeId u : p.inputs(n.id)) slots.push_back(index.at(u));
      ins.push_back(std::move(slots));
    }
    sink = index.at(p.sink);
    const std::size_t n = ids.size();
    in_store.assign(n, 0);
    touch.assign(n, 0);
    demands.assign(n, 0);
    computes.assign(n, 0);
  }

  std::vector<int> store_order() const {
    std::vector<int> order;
    for (std::size_t v = 0; v < ids.size(); ++v) {
      if (in_store[v] != 0) order.push_back(static_cast<int>(v));
    }
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return touch[a] < touch[b]; });
    return order;
  }

  void evict_to(double target) {
    while (used > target) {
      int victim = -1;
      for (std::size_t v = 0; v < ids.size(); ++v) {
        if (in_store[v] == 0) continue;
        if (victim < 0 || touch[v] < touch[victim]) victim = static_cast<int>(v);
      }
      if (victim < 0) return;
      in_store[victim] = 0;
      used -= bytes[victim];
    }
  }

  void resolve(int v) {
    check(++events <= kMaxReplayEvents, ErrorCode::kExecution,
          "cache replay exceeded the event limit; weight loops never "
          "reached a steady store state");
    ++demands[v];
    if (in_store[v] != 0) {
      touch[v] = ++clock;
      return;
    }
    const int w = weight[v];
    if (ins[v].empty()) {
      // Source: no pulls, all passes identical.
    } else if (w <= 1) {
      for (int u : ins[v]) resolve(u);
    } else {
      std::vector<int> prev_state = store_order();
      for (int pass = 0; pass < w; ++pass) {
        const double time0 = time;
        std::vector<std::uint64_t> dem0 = demands;
        std::vector<std::uint64_t> cmp0 = computes;
        for (int u : ins[v]) resolve(u);
        std::vector<int> state = store_order();
        if (state == prev_state) {
          const std::uint64_t left = static_cast<std::uint64_t>(w - 1 - pass);
          if (left > 0) {
            time += (time - time0) * static_cast<double>(left);
            for (std::size_t i = 0; i < demands.size(); ++i) {
              demands[i] += (demands[i] - dem0[i]) * left;
              computes[i] += (computes[i] - cmp0[i]) * left;
            }
          }
          break;
        }
        prev_state = std::move(state);
      }
    }
    time += t_pass[v] * static_cast<double>(w);
    ++computes[v];
    if (bytes[v] <= cap) {
      evict_to(budget - bytes[v]);
      if (used + bytes[v] <= budget) {
        in_store[v] = 1;
        touch[v] = ++clock;
        used += bytes[v];
        peak = std::max(peak, used);
      }
    }
  }
};

}  // namespace

LruSim simulate_lru(const Profile& p, double budget_bytes,
                    double admission_fraction) {
  p.validate();
  Replay r(p, budget_bytes, admission_fraction);
  r.resolve(r.sink);
  LruSim out;
  out.time_sec = r.time;
  out.peak_bytes = r.peak;
  for (std::size_t v = 0; v < r.ids.size(); ++v) {
    out.demands[r.ids[v]] = r.demands[v];
    out.computes[r.ids[v]] = r.computes[v];
  }
  return out;
}

std::vector<BenchRow> bench_cache_table(const Profile& p,
                                        const std::vector<double>& budgets,
                                        const std::vector<CachePolicy>& policies,
                                        double admission_fraction,
                                        int optimal_guard) {
  check(!budgets.empty(), ErrorCode::kInvalidArgument,
        "benchmark needs at least one budget");
  std::vector<BenchRow> rows;
  for (double budget : budgets) {
    for (CachePolicy policy : policies) {
      BenchRow row;
      row.policy = policy;
      row.budget = budget;
      switch (policy) {
        case CachePolicy::kNone: {
          row.sim_sec = est_runtime(p, {});
          row.cached_bytes = 0;
          row.cached_nodes = 0;
          break;
        }
        case CachePolicy::kGreedy: {
          const std::set<NodeId> set = plan_greedy(p, budget);
          row.sim_sec = est_runtime(p, set);
          row.cached_bytes = cache_bytes(p, set);
          row.cached_nodes = static_cast<int>(set.size());
          break;
        }
        case CachePolicy::kRule: {
          const std::set<NodeId> set = plan_rule(p, budget);
          row.sim_sec = est_runtime(p, set);
          row.cached_bytes = cache_bytes(p, set);
          row.cached_nodes = static_cast<int>(set.size());
          break;
        }
        case CachePolicy::kOptimal: {
          if (p.nodes.size() > static_cast<std::size_t>(optimal_guard)) {
            continue;
          }
          const std::set<NodeId> set = plan_optimal(p, budget);
          row.sim_sec = est_runtime(p, set);
          row.cached_bytes = cache_bytes(p, set);
          row.cached_nodes = static_cast<int>(set.size());
          break;
        }
        case CachePolicy::kLru: {
          const LruSim sim = simulate_lru(p, budget, admission_fraction);
          row.sim_sec = sim.time_sec;
          row.cached_bytes = sim.peak_bytes;
          row.cached_nodes = -1;
          break;
        }
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace pipeplan
