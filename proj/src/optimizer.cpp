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

#include "optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "common.hpp"

namespace pipeplan {
namespace {

// Index-based mirror of a profile for tight simulation loops.
struct FlatProfile {
  std::vector<NodeId> ids;
  std::vector<double> t, w, bytes;
  std::vector<std::vector<int>> cons;  // consumer index per edge
  std::vector<int> order;              // topological positions
  int sink_idx = -1;

  explicit FlatProfile(const Profile& p) {
    std::map<NodeId, int> pos;
    ids.reserve(p.nodes.size());
    for (const auto& n : p.nodes) {
      pos[n.id] = static_cast<int>(ids.size());
      ids.push_back(n.id);
      t.push_back(n.t_sec);
      w.push_back(static_cast<double>(n.weight));
      bytes.push_back(n.out_bytes);
    }
    cons.resize(ids.size());
    for (const auto& e : p.edges) {
      cons[pos.at(e.from)].push_back(pos.at(e.to));
    }
    for (NodeId id : p.topo_order()) order.push_back(pos.at(id));
    sink_idx = pos.at(p.sink);
  }

  // demands/computes per index; returns total seconds.
  double run(const std::vector<char>& cached, std::vector<double>* demands,
             std::vector<double>* computes) const {
    std::vector<double>& dem = *demands;
    std::vector<double>& cmp = *computes;
    dem.assign(ids.size(), 0.0);
    cmp.assign(ids.size(), 0.0);
    double time = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int v = *it;
      double d = v == sink_idx ? 1.0 : 0.0;
      for (int c : cons[v]) d += w[c] * cmp[c];
      dem[v] = d;
      cmp[v] = cached[v] ? (d > 0 ? 1.0 : 0.0) : d;
      time += cmp[v] * w[v] * t[v];
    }
    return time;
  }
};

std::vector<char> mask_of(const FlatProfile& fp, const std::set<NodeId>& cached) {
  std::vector<char> mask(fp.ids.size(), 0);
  for (std::size_t i = 0; i < fp.ids.size(); ++i) {
    if (cached.count(fp.ids[i]) != 0) mask[i] = 1;
  }
  return mask;
}

}  // namespace

SimCounts simulate_counts(const Profile& p, const std::set<NodeId>& cached) {
  FlatProfile fp(p);
  std::vector<double> dem, cmp;
  SimCounts out;
  out.time = fp.run(mask_of(fp, cached), &dem, &cmp);
  for (std::size_t i = 0; i < fp.ids.size(); ++i) {
    out.demands[fp.ids[i]] = dem[i];
    out.computes[fp.ids[i]] = cmp[i];
  }
  return out;
}

double est_runtime(const Profile& p, const std::set<NodeId>& cached) {
  FlatProfile fp(p);
  std::vector<double> dem, cmp;
  return fp.run(mask_of(fp, cached), &dem, &cmp);
}

double est_runtime_recursive(const Profile& p, const std::set<NodeId>& cached) {
  // Pull factor C(v): how often v's output is demanded, with cached
  // consumers contributing a single compute.
  std::map<NodeId, double> C;
  std::vector<NodeId> topo = p.topo_order();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    const NodeId v = *it;
    const auto consumers = p.consumers(v);
    if (consumers.empty()) {
      C[v] = 1.0;
      continue;
    }
    double c = 0;
    for (NodeId q : consumers) {
      const ProfileNode& pq = p.node(q);
      const double cq = C.at(q);
      c += pq.weight * (cached.count(q) != 0 ? 1.0 : cq);
    }
    C[v] = c;
  }
  // Amortized subtree time: a cached node spreads its one computation
  // over every pull.
  std::map<NodeId, double> T;
  for (NodeId v : topo) {
    const ProfileNode& pn = p.node(v);
    double sum = pn.t_sec;
    for (NodeId u : p.inputs(v)) sum += T.at(u);
    double val = pn.weight * sum;
    if (cached.count(v) != 0) val /= C.at(v);
    T[v] = val;
  }
  return T.at(p.sink);
}

double cache_bytes(const Profile& p, const std::set<NodeId>& cached) {
  double total = 0;
  for (NodeId v : cached) total += p.node(v).out_bytes;
  return total;
}

std::set<NodeId> plan_greedy(const Profile& p, double budget_bytes,
                             std::vector<GreedyPick>* picks) {
  FlatProfile fp(p);
  const std::size_t n = fp.ids.size();
  std::vector<char> mask(n, 0);
  std::vector<double> dem, cmp, dem2, cmp2;
  double left = budget_bytes;
  double cur = fp.run(mask, &dem, &cmp);
  std::set<NodeId> cached;
  for (;;) {
    int best = -1;
    double best_time = cur;
    for (std::size_t v = 0; v < n; ++v) {
      if (mask[v] != 0 || fp.bytes[v] > left) continue;
      // A node pulled at most once gains nothing from caching.
      if (dem[v] <= 1.0) continue;
      mask[v] = 1;
      const double t = fp.run(mask, &dem2, &cmp2);
      mask[v] = 0;
      if (t < best_time ||
          (best >= 0 && t == best_time &&
           (fp.bytes[v] < fp.bytes[best] ||
            (fp.bytes[v] == fp.bytes[best] && fp.ids[v] < fp.ids[best])))) {
        best = static_cast<int>(v);
        best_time = t;
      }
    }
    if (best < 0) break;
    mask[best] = 1;
    cached.insert(fp.ids[best]);
    left -= fp.bytes[best];
    if (picks != nullptr) {
      picks->push_back({fp.ids[best], cur - best_time, fp.bytes[best]});
    }
    cur = fp.run(mask, &dem, &cmp);
  }
  return cached;
}

std::set<NodeId> plan_optimal(const Profile& p, double budget_bytes) {
  FlatProfile fp(p);
  const std::size_t n = fp.ids.size();
  check(n <= 24, ErrorCode::kInvalidArgument,
        "exhaustive cache search is limited to 24 nodes");
  std::vector<double> dem, cmp;
  std::vector<char> mask(n, 0);
  double best_time = fp.run(mask, &dem, &cmp);
  double best_bytes = 0;
  std::uint32_t best_bits = 0;
  const std::uint32_t limit = static_cast<std::uint32_t>(1u) << n;
  for (std::uint32_t bits = 1; bits < limit; ++bits) {
    double total = 0;
    for (std::size_t v = 0; v < n; ++v) {
      if ((bits >> v) & 1u) total += fp.bytes[v];
    }
    if (total > budget_bytes) continue;
    for (std::size_t v = 0; v < n; ++v) mask[v] = (bits >> v) & 1u ? 1 : 0;
    const double t = fp.run(mask, &dem, &cmp);
    bool better = t < best_time;
    if (!better && t == best_time) {
      if (total < best_bytes) {
        better = true;
      } else if (total == best_bytes) {
        // Lexicographic over the ascending id lists.
        std::vector<NodeId> a, b;
        for (std::size_t v = 0; v < n; ++v) {
          if ((bits >> v) & 1u) a.push_back(fp.ids[v]);
          if ((best_bits >> v) & 1u) b.push_back(fp.ids[v]);
        }
        better = a < b;
      }
    }
    if (better) {
      best_time = t;
      best_bytes = total;
      best_bits = bits;
    }
  }
  std::set<NodeId> cached;
  for (std::size_t v = 0; v < n; ++v) {
    if ((best_bits >> v) & 1u) cached.insert(fp.ids[v]);
  }
  return cached;
}

std::set<NodeId> plan_rule(const Profile& p, double budget_bytes) {
  std::set<NodeId> cached;
  double left = budget_bytes;
  for (NodeId v : p.topo_order()) {
    const ProfileNode& pn = p.node(v);
    if (pn.role != 'E') continue;
    if (pn.out_bytes > left) continue;
    cached.insert(v);
    left -= pn.out_bytes;
  }
  return cached;
}

PipelineGraph merge_common_subexpressions(const PipelineGraph& g,
                                          std::map<NodeId, NodeId>* remap) {
  // Phase 1: group structurally identical nodes.  Inputs resolve through
  // their class tag (first member seen), so chains collapse in one topo
  // pass and keys stay linear in fan-in.
  std::map<NodeId, NodeId> tag;
  std::map<std::string, std::vector<NodeId>> classes;
  std::map<std::string, NodeId> first_of;
  for (NodeId v : g.topo_order()) {
    const LogicalNode& n = g.node(v);
    std::string key = std::string(op_kind_name(n.kind)) + "\x1f" +
                      n.params.canonical() + "\x1f";
    for (NodeId u : g.inputs(v)) {
      key += std::to_string(tag.at(u));
      key.push_back(',');
    }
    tag[v] = first_of.emplace(key, v).first->second;
    classes[key].push_back(v);
  }
  // Phase 2: each class survives as its smallest id.
  std::map<NodeId, NodeId> rep;
  for (const auto& [key, members] : classes) {
    const NodeId keep = *std::min_element(members.begin(), members.end());
    for (NodeId v : members) rep[v] = keep;
  }
  std::vector<LogicalNode> nodes;
  std::vector<GraphEdge> edges;
  for (const auto& n : g.nodes()) {
    if (rep.at(n.id) != n.id) continue;
    nodes.push_back(n);
    const auto ins = g.inputs(n.id);
    for (std::size_t s = 0; s < ins.size(); ++s) {
      edges.push_back(GraphEdge{rep.at(ins[s]), n.id, static_cast<int>(s)});
    }
  }
  if (remap != nullptr) *remap = rep;
  return PipelineGraph::from_parts(std::move(nodes), std::move(edges),
                                   rep.at(g.sink()));
}

}  // namespace pipeplan
