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

#include "executor.hpp"

#include <algorithm>
#include <map>

#include "common.hpp"

namespace pipeplan {

const char* cache_policy_name(CachePolicy p) {
  switch (p) {
    case CachePolicy::kNone: return "none";
    case CachePolicy::kGreedy: return "greedy";
    case CachePolicy::kRule: return "rule";
    case CachePolicy::kOptimal: return "optimal";
    case CachePolicy::kLru: return "lru";
  }
  return "?";
}

bool parse_cache_policy(const std::string& s, CachePolicy* out) {
  if (s == "none") *out = CachePolicy::kNone;
  else if (s == "greedy") *out = CachePolicy::kGreedy;
  else if (s == "rule") *out = CachePolicy::kRule;
  else if (s == "optimal") *out = CachePolicy::kOptimal;
  else if (s == "lru") *out = CachePolicy::kLru;
  else return false;
  return true;
}

namespace {

struct StoreEntry {
  ValuePtr val;
  double bytes = 0;
  bool pinned = false;
  std::uint64_t touch = 0;
};

// Budgeted store.  Pinned entries never leave; unpinned ones enter only
// through LRU admission and make room by evicting the stalest unpinned
// entry first.
class CacheStore {
 public:
  CacheStore(double budget, double admission_fraction)
      : budget_(budget), admission_fraction_(admission_fraction) {}

  void set_lru_admission(bool on) { lru_on_ = on; }

  ValuePtr get(NodeId id) {
    auto it = entries_.find(id);
    if (it == entries_.end()) return nullptr;
    it->second.touch = ++clock_;
    return it->second.val;
  }

  // Returns false when a pinned value cannot be held within budget.
  bool put(NodeId id, const ValuePtr& v, double bytes, bool pinned) {
    if (entries_.count(id) != 0) return true;  // recomputed identical value
    if (pinned) {
      evict_unpinned_to(budget_ - bytes);
      if (used_ + bytes > budget_) return false;
      insert(id, v, bytes, true);
      return true;
    }
    if (!lru_on_ || bytes > admission_fraction_ * budget_) return true;
    evict_unpinned_to(budget_ - bytes);
    if (used_ + bytes > budget_) return true;  // pinned mass leaves no room
    insert(id, v, bytes, false);
    return true;
  }

  double peak_bytes() const { return peak_; }

 private:
  void insert(NodeId id, const ValuePtr& v, double bytes, bool pinned) {
    StoreEntry e;
    e.val = v;
    e.bytes = bytes;
    e.pinned = pinned;
    e.touch = ++clock_;
    entries_[id] = std::move(e);
    used_ += bytes;
    peak_ = std::max(peak_, used_);
  }

  void evict_unpinned_to(double target) {
    while (used_ > target) {
      NodeId victim = 0;
      std::uint64_t oldest = 0;
      bool found = false;
      for (const auto& [id, e] : entries_) {
        if (e.pinned) continue;
        if (!found || e.touch < oldest) {
          victim = id;
          oldest = e.touch;
          found = true;
        }
      }
      if (!found) return;
      used_ -= entries_[victim].bytes;
      entries_.erase(victim);
    }
  }

  double budget_;
  double admission_fraction_;
  bool lru_on_ = false;
  std::uint64_t clock_ = 0;
  double used_ = 0;
  double peak_ = 0;
  std::map<NodeId, StoreEntry> entries_;
};

struct Walk {
  const PipelineGraph& g;
  const PlanMap& plan;
  const Profile* profile;
  const OpContext& ctx;
  const ExecOptions& opts;
  CacheStore store;
  std::map<NodeId, std::uint64_t> demands;
  std::map<NodeId, std::uint64_t> computes;
  std::map<NodeId, double> measured;
  std::map<NodeId, double> out_bytes;
  bool fallback = false;
  std::vector<std::string> warnings;

  Walk(const PipelineGraph& graph, const PlanMap& pm, const Profile* prof,
       const OpContext& c, const ExecOptions& o)
      : g(graph), plan(pm), profile(prof), ctx(c), opts(o),
        store(o.budget_bytes, o.admission_fraction) {
    store.set_lru_admission(o.lru_admission);
  }

  ValuePtr resolve(NodeId v) {
    ++demands[v];
    if (ValuePtr hit = store.get(v)) return hit;

    const LogicalNode& n = g.node(v);
    const NodePlan& np = plan.at(v);
    const auto& ins = g.inputs(v);
    std::vector<ValuePtr> vals;
    for (int pass = 0; pass < np.weight; ++pass) {
      vals.clear();
      for (NodeId u : ins) vals.push_back(resolve(u));
    }
    const double t0 = now_sec();
    ValuePtr out = eval_op(n, g.type_of(v), vals, ctx, np.impl);
    const double dt = now_sec() - t0;
    measured[v] += dt;
    const double bytes = static_cast<double>(value_bytes(*out));
    out_bytes[v] = bytes;
    if (++computes[v] == 1 && opts.enable_fallback && !fallback &&
        profile != nullptr && profile->has(v)) {
      const ProfileNode& pn = profile->node(v);
      const double pred = pn.t_sec * pn.weight;
      if (pred >= opts.fallback_min_sec && dt > opts.fallback_ratio * pred) {
        fallback = true;
        store.set_lru_admission(true);
        warnings.push_back("prediction missed on " + n.name +
                           ": switching to admission caching");
      }
    }
    const bool pin = opts.pinned.count(v) != 0;
    if (!store.put(v, out, bytes, pin)) {
      warnings.push_back("pinned result of " + n.name +
                         " does not fit in budget; keeping it unpinned");
    }
    return out;
  }
};

}  // namespace

ExecResult execute_pipeline(const PipelineGraph& g, const PlanMap& plan,
                            const Profile* profile, const OpContext& ctx,
                            const ExecOptions& opts) {
  for (NodeId v : opts.pinned) {
    check(g.has_node(v), ErrorCode::kInvalidArgument,
          "pinned set names unknown node " + std::to_string(v));
  }
  Walk walk(g, plan, profile, ctx, opts);
  const double t0 = now_sec();
  ValuePtr sink = walk.resolve(g.sink());
  const double wall = now_sec() - t0;

  ExecResult res;
  res.sink_value = sink;
  res.wall_sec = wall;
  res.peak_cache_bytes = walk.store.peak_bytes();
  res.fallback_triggered = walk.fallback;
  res.warnings = std::move(walk.warnings);
  for (const auto& n : g.nodes()) {
    NodeTraceEntry e;
    e.id = n.id;
    e.name = n.name;
    e.demands = walk.demands.count(n.id) != 0 ? walk.demands[n.id] : 0;
    e.computes = walk.computes.count(n.id) != 0 ? walk.computes[n.id] : 0;
    e.measured_sec = walk.measured.count(n.id) != 0 ? walk.measured[n.id] : 0;
    e.bytes = walk.out_bytes.count(n.id) != 0
                  ? static_cast<std::uint64_t>(walk.out_bytes[n.id])
                  : 0;
    e.pinned = opts.pinned.count(n.id) != 0;
    if (profile != nullptr && profile->has(n.id)) {
      const ProfileNode& pn = profile->node(n.id);
      e.predicted_sec = pn.t_sec * pn.weight;
    }
    res.trace.push_back(std::move(e));
  }
  return res;
}

}  // namespace pipeplan
