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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "graph.hpp"
#include "optimizer.hpp"
#include "rng.hpp"
#include "synth.hpp"

namespace pipeplan {
namespace {

ProfileNode mk(NodeId id, const std::string& name, double t, int w,
               double bytes, char role = 'T') {
  ProfileNode n;
  n.id = id;
  n.name = name;
  n.kind = "ElementMap";
  n.impl = "Map";
  n.role = role;
  n.weight = w;
  n.t_sec = t;
  n.out_bytes = bytes;
  return n;
}

// Weighted diamond A -> {B, C} -> D.  All hand numbers below follow the
// accounting: demands(v) = [v is sink] + sum over consumer edges of
// weight(c) * computes(c); computes = demands unless cached (then 1);
// time = sum computes * weight * t.
Profile diamond() {
  Profile p;
  p.nodes = {mk(1, "A", 1.0, 1, 100.0), mk(2, "B", 1.0, 2, 50.0),
             mk(3, "C", 1.0, 3, 40.0), mk(4, "D", 1.0, 2, 10.0)};
  p.edges = {{1, 2, 0}, {1, 3, 0}, {2, 4, 0}, {3, 4, 1}};
  p.sink = 4;
  p.scale_records = 100;
  return p;
}

TEST_CASE("simulate_counts on the weighted diamond, no cache") {
  Profile p = diamond();
  SimCounts s = simulate_counts(p, {});
  CHECK(s.demands.at(4) == 1.0);
  CHECK(s.computes.at(4) == 1.0);
  CHECK(s.demands.at(2) == 2.0);  // sink scans B twice (weight 2)
  CHECK(s.computes.at(2) == 2.0);
  CHECK(s.demands.at(3) == 2.0);
  CHECK(s.demands.at(1) == 10.0);  // 2*2 from B + 3*2 from C
  CHECK(s.time == doctest::Approx(22.0));  // 10 + 4 + 6 + 2
}

TEST_CASE("est_runtime responds to cache sets as hand computed") {
  Profile p = diamond();
  CHECK(est_runtime(p, {}) == doctest::Approx(22.0));
  CHECK(est_runtime(p, {3}) == doctest::Approx(16.0));
  CHECK(est_runtime(p, {2}) == doctest::Approx(18.0));
  CHECK(est_runtime(p, {1}) == doctest::Approx(13.0));
  CHECK(est_runtime(p, {2, 3}) == doctest::Approx(12.0));
  CHECK(est_runtime(p, {1, 2, 3}) == doctest::Approx(8.0));
  // Caching the sink changes nothing: it is demanded once already.
  CHECK(est_runtime(p, {4}) == doctest::Approx(22.0));
}

TEST_CASE("recursive estimate agrees with demand counting") {
  Profile p = diamond();
  for (const std::set<NodeId>& cached :
       std::vector<std::set<NodeId>>{{}, {1}, {3}, {2, 3}, {1, 2, 3, 4}}) {
    CHECK(est_runtime_recursive(p, cached) ==
          doctest::Approx(est_runtime(p, cached)).epsilon(1e-12));
  }
}

TEST_CASE("recursive and counting estimates agree on random DAGs") {
  SynthDagOptions opt;
  opt.nodes = 12;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Profile p = synth_profile(opt, seed);
    // Random cache subsets from the node list.
    Rng rng(seed * 77 + 5);
    std::set<NodeId> cached;
    for (const auto& n : p.nodes)
      if (rng.uniform() < 0.4) cached.insert(n.id);
    double a = est_runtime(p, cached);
    double b = est_runtime_recursive(p, cached);
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
  }
}

TEST_CASE("cache_bytes sums pinned outputs") {
  Profile p = diamond();
  CHECK(cache_bytes(p, {}) == 0.0);
  CHECK(cache_bytes(p, {1, 3}) == doctest::Approx(140.0));
  CHECK(cache_bytes(p, {1, 2, 3, 4}) == doctest::Approx(200.0));
}

TEST_CASE("greedy picks by marginal saving under the budget") {
  Profile p = diamond();
  std::vector<GreedyPick> picks;
  std::set<NodeId> got = plan_greedy(p, 200.0, &picks);
  CHECK(got == std::set<NodeId>{1, 2, 3});
  REQUIRE(picks.size() == 3);
  // First pick is A: caching it saves 9 seconds (22 -> 13).
  CHECK(picks[0].id == 1);
  CHECK(picks[0].saved_sec == doctest::Approx(9.0));
  CHECK(picks[0].bytes == doctest::Approx(100.0));
  // Then C (13 -> 10), then B (10 -> 8).
  CHECK(picks[1].id == 3);
  CHECK(picks[1].saved_sec == doctest::Approx(3.0));
  CHECK(picks[2].id == 2);
  CHECK(picks[2].saved_sec == doctest::Approx(2.0));
}

TEST_CASE("greedy respects a tight budget") {
  Profile p = diamond();
  // A (100 bytes) does not fit; C gives the best remaining saving.
  std::set<NodeId> got = plan_greedy(p, 60.0);
  CHECK(got == std::set<NodeId>{3});
  CHECK(est_runtime(p, got) == doctest::Approx(16.0));
  // Nothing fits at all: empty plan.
  CHECK(plan_greedy(p, 5.0).empty());
}

TEST_CASE("optimal search matches exhaustive reasoning") {
  Profile p = diamond();
  // At 60 bytes {C} is the unique best subset; {C, D} ties on time but
  // pins more bytes, so the tiebreak drops it.
  CHECK(plan_optimal(p, 60.0) == std::set<NodeId>{3});
  // Unconstrained: D adds nothing, so it is not pinned.
  CHECK(plan_optimal(p, 1e9) == std::set<NodeId>{1, 2, 3});
}

TEST_CASE("greedy never loses to no cache and optimal never loses to greedy") {
  SynthDagOptions opt;
  opt.nodes = 10;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Profile p = synth_profile(opt, seed);
    double total = total_intermediate_bytes(p);
    for (double frac : {0.25, 0.5, 1.0}) {
      double budget = frac * total;
      double none = est_runtime(p, {});
      double greedy = est_runtime(p, plan_greedy(p, budget));
      double best = est_runtime(p, plan_optimal(p, budget));
      CHECK(greedy <= none * (1.0 + 1e-12));
      CHECK(best <= greedy * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("greedy equals optimal when every node fits") {
  SynthDagOptions opt;
  opt.nodes = 11;
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    Profile p = synth_profile(opt, seed);
    double budget = total_intermediate_bytes(p);
    double greedy = est_runtime(p, plan_greedy(p, budget));
    double best = est_runtime(p, plan_optimal(p, budget));
    CHECK(greedy == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("optimal search rejects oversized profiles") {
  Profile p;
  for (NodeId i = 1; i <= 25; ++i)
    p.nodes.push_back(mk(i, "n" + std::to_string(i), 0.1, 1, 10.0));
  for (NodeId i = 1; i < 25; ++i) p.edges.push_back({i, i + 1, 0});
  p.sink = 25;
  p.scale_records = 10;
  try {
    plan_optimal(p, 100.0);
    FAIL("expected size guard");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidArgument);
  }
}

TEST_CASE("rule planner pins fitted models in topo order") {
  Profile p = diamond();
  p.node(2).role = 'E';
  p.node(3).role = 'E';
  // Both estimator outputs fit: both pinned.
  CHECK(plan_rule(p, 100.0) == std::set<NodeId>{2, 3});
  // 60 bytes: B (50) is pinned first by topo order, C (40) no longer fits.
  CHECK(plan_rule(p, 60.0) == std::set<NodeId>{2});
  // No estimators: nothing to pin.
  Profile q = diamond();
  CHECK(plan_rule(q, 1e9).empty());
}

// ---- common subexpression merging ---------------------------------------

PipelineGraph duplicated_chain() {
  PipelineGraph src =
      PipelineGraph::source(OpKind::kDataSource,
                            Params::parse_kv("format=text n=50"), "docs");
  PipelineGraph tok_a = src.and_then(OpKind::kTokenize, Params(), "tok_a");
  PipelineGraph tok_b = src.and_then(OpKind::kTokenize, Params(), "tok_b");
  PipelineGraph grams_a =
      tok_a.and_then(OpKind::kNGrams, Params::parse_kv("n=2"), "grams_a");
  PipelineGraph grams_b =
      tok_b.and_then(OpKind::kNGrams, Params::parse_kv("n=2"), "grams_b");
  PipelineGraph vocab = PipelineGraph::apply(
      OpKind::kTopKFeatures, Params::parse_kv("k=10"), {&grams_a}, "vocab");
  return PipelineGraph::apply(OpKind::kTermFrequency, Params(),
                              {&grams_b, &vocab}, "feats");
}

TEST_CASE("merge collapses structurally identical chains") {
  PipelineGraph g = duplicated_chain();
  REQUIRE(g.node_count() == 7);
  std::map<NodeId, NodeId> remap;
  PipelineGraph m = merge_common_subexpressions(g, &remap);
  // tok_a/tok_b and grams_a/grams_b merge pairwise: 7 -> 5 nodes.
  CHECK(m.node_count() == 5);
  // Every original node maps somewhere, and the merged graph contains it.
  for (const auto& n : g.nodes()) {
    REQUIRE(remap.count(n.id) == 1);
    CHECK(m.has_node(remap.at(n.id)));
  }
  // The two tokenizers map to one survivor (the smaller id).
  NodeId tok_a = 0, tok_b = 0;
  for (const auto& n : g.nodes()) {
    if (n.name == "tok_a") tok_a = n.id;
    if (n.name == "tok_b") tok_b = n.id;
  }
  CHECK(remap.at(tok_a) == remap.at(tok_b));
  CHECK(remap.at(tok_a) == std::min(tok_a, tok_b));
}

TEST_CASE("merge is idempotent") {
  PipelineGraph g = duplicated_chain();
  PipelineGraph once = merge_common_subexpressions(g, nullptr);
  PipelineGraph twice = merge_common_subexpressions(once, nullptr);
  CHECK(twice.node_count() == once.node_count());
  CHECK(twice.edges().size() == once.edges().size());
}

TEST_CASE("differing params block the merge") {
  PipelineGraph src = PipelineGraph::source(
      OpKind::kDataSource, Params::parse_kv("format=text n=50"), "docs");
  PipelineGraph tok = src.and_then(OpKind::kTokenize, Params(), "tok");
  PipelineGraph g2 =
      tok.and_then(OpKind::kNGrams, Params::parse_kv("n=2"), "bi");
  PipelineGraph g3 =
      tok.and_then(OpKind::kNGrams, Params::parse_kv("n=3"), "tri");
  PipelineGraph vocab2 = PipelineGraph::apply(
      OpKind::kTopKFeatures, Params::parse_kv("k=5"), {&g2}, "v2");
  PipelineGraph vocab3 = PipelineGraph::apply(
      OpKind::kTopKFeatures, Params::parse_kv("k=5"), {&g3}, "v3");
  PipelineGraph both = PipelineGraph::apply(
      OpKind::kTermFrequency, Params(), {&g2, &vocab2}, "f");
  (void)vocab3;
  std::map<NodeId, NodeId> remap;
  PipelineGraph m = merge_common_subexpressions(both, &remap);
  // Nothing here is structurally equal: counts stay put.
  CHECK(m.node_count() == both.node_count());
}

TEST_CASE("simulation reflects merged reuse") {
  // After merging, the surviving grams chain is demanded from two places;
  // the unmerged graph computes it twice even with no cache.
  PipelineGraph g = duplicated_chain();
  PipelineGraph m = merge_common_subexpressions(g, nullptr);
  // Build a tiny uniform profile over the merged graph by hand.
  Profile p;
  for (const auto& n : m.nodes()) {
    ProfileNode pn = mk(n.id, n.name, 1.0, n.iteration_weight, 10.0,
                        n.role == Role::kEstimator ? 'E' : 'T');
    pn.kind = op_kind_name(n.kind);
    p.nodes.push_back(pn);
  }
  p.edges = m.edges();
  p.sink = m.sink();
  p.scale_records = 50;
  SimCounts s = simulate_counts(p, {});
  // The shared grams node is pulled by both vocab and feats.
  NodeId grams = 0;
  for (const auto& n : m.nodes())
    if (n.kind == OpKind::kNGrams) grams = n.id;
  CHECK(s.demands.at(grams) == 2.0);
}

}  // namespace
}  // namespace pipeplan
