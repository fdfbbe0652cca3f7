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

#include <map>
#include <set>
#include <vector>

#include "executor.hpp"
#include "optimizer.hpp"
#include "synth.hpp"

namespace pipeplan {
namespace {

// src -> m1 (weight 2) -> m2; sink gathers m2 and m1, so m1 is demanded
// twice: once via m2 and once directly.
struct Fixture {
  PipelineGraph g;
  NodeId src, m1, m2;

  Fixture()
      : g(PipelineGraph::source(OpKind::kDataSource,
                                Params::parse_kv("n=2000 d=6"), "src")) {
    src = g.sink();
    g = g.and_then(OpKind::kElementMap, Params::parse_kv("fn=sqrtabs w=2"),
                   "m1");
    m1 = g.sink();
    PipelineGraph b =
        g.and_then(OpKind::kElementMap, Params::parse_kv("fn=scale factor=1.5"),
                   "m2");
    m2 = b.sink();
    PipelineGraph a = g;
    g = PipelineGraph::gather({&b, &a}, "out");
  }
};

// Uniform profile over the graph; counts depend only on topology and
// weights, so the time and byte entries are arbitrary.  Weights must
// mirror the physical plan, exactly as profiling does: the executor pulls
// inputs plan-weight times, not logical-default times.
Profile unit_profile(const PipelineGraph& g, const PlanMap& plan) {
  Profile p;
  for (const auto& n : g.nodes()) {
    ProfileNode pn;
    pn.id = n.id;
    pn.name = n.name;
    pn.kind = op_kind_name(n.kind);
    pn.role = n.role == Role::kEstimator ? 'E'
              : n.role == Role::kSource  ? 'S'
                                         : 'T';
    pn.weight = plan.at(n.id).weight;
    pn.t_sec = 1.0;
    pn.out_bytes = 100.0;
    p.nodes.push_back(pn);
  }
  p.edges = g.edges();
  p.sink = g.sink();
  p.scale_records = 2000;
  return p;
}

const DenseData& sink_dense(const ExecResult& r) {
  REQUIRE(r.sink_value != nullptr);
  return std::get<DenseData>(*r.sink_value);
}

const NodeTraceEntry& entry(const ExecResult& r, NodeId id) {
  for (const auto& e : r.trace)
    if (e.id == id) return e;
  REQUIRE(false);
  static NodeTraceEntry dummy;
  return dummy;
}

TEST_CASE("trace counts match the simulation, uncached") {
  Fixture f;
  OpContext ctx;
  ExecOptions opts;
  ExecResult r = execute_pipeline(f.g, default_plan(f.g), nullptr, ctx, opts);

  SimCounts sim = simulate_counts(unit_profile(f.g, default_plan(f.g)), {});
  for (const auto& e : r.trace) {
    CHECK(static_cast<double>(e.demands) == sim.demands.at(e.id));
    CHECK(static_cast<double>(e.computes) == sim.computes.at(e.id));
  }
  // Spot values: m1 is pulled by m2 once and the gather once; each of its
  // two computations scans the source twice (weight 2).
  CHECK(entry(r, f.m1).demands == 2);
  CHECK(entry(r, f.m1).computes == 2);
  CHECK(entry(r, f.src).demands == 4);
  CHECK(r.peak_cache_bytes == 0.0);
}

TEST_CASE("pinning a node computes it once and caches its bytes") {
  Fixture f;
  OpContext ctx;
  ExecOptions opts;
  opts.pinned = {f.m1};
  ExecResult r = execute_pipeline(f.g, default_plan(f.g), nullptr, ctx, opts);

  SimCounts sim = simulate_counts(unit_profile(f.g, default_plan(f.g)), {f.m1});
  for (const auto& e : r.trace) {
    CHECK(static_cast<double>(e.demands) == sim.demands.at(e.id));
    CHECK(static_cast<double>(e.computes) == sim.computes.at(e.id));
  }
  CHECK(entry(r, f.m1).computes == 1);
  CHECK(entry(r, f.m1).pinned);
  CHECK(entry(r, f.src).demands == 2);
  CHECK(r.peak_cache_bytes == doctest::Approx(entry(r, f.m1).bytes));
}

TEST_CASE("lru admission caches reused values when they fit") {
  Fixture f;
  OpContext ctx;
  ExecOptions opts;
  opts.lru_admission = true;
  opts.budget_bytes = 64 << 20;
  opts.admission_fraction = 1.0;
  ExecResult r = execute_pipeline(f.g, default_plan(f.g), nullptr, ctx, opts);
  // Everything fits, so even unpinned nodes compute at most once.
  for (const auto& e : r.trace) CHECK(e.computes == 1);
  CHECK(r.peak_cache_bytes > 0.0);
}

TEST_CASE("zero admission cap turns lru caching off") {
  Fixture f;
  OpContext ctx;
  ExecOptions opts;
  opts.lru_admission = true;
  opts.budget_bytes = 64 << 20;
  opts.admission_fraction = 0.0;
  ExecResult r = execute_pipeline(f.g, default_plan(f.g), nullptr, ctx, opts);
  CHECK(entry(r, f.m1).computes == 2);  // recomputed on the second pull
  CHECK(r.peak_cache_bytes == 0.0);
}

TEST_CASE("sink value is bit identical across cache policies") {
  Fixture f;
  OpContext ctx;
  PlanMap plan = default_plan(f.g);

  ExecOptions none;
  ExecResult r_none = execute_pipeline(f.g, plan, nullptr, ctx, none);

  ExecOptions pin;
  pin.pinned = {f.m1, f.m2};
  ExecResult r_pin = execute_pipeline(f.g, plan, nullptr, ctx, pin);

  ExecOptions lru;
  lru.lru_admission = true;
  lru.budget_bytes = 64 << 20;
  ExecResult r_lru = execute_pipeline(f.g, plan, nullptr, ctx, lru);

  const DenseData& a = sink_dense(r_none);
  const DenseData& b = sink_dense(r_pin);
  const DenseData& c = sink_dense(r_lru);
  REQUIRE(a.v.size() == b.v.size());
  REQUIRE(a.v.size() == c.v.size());
  CHECK(a.v == b.v);
  CHECK(a.v == c.v);
}

TEST_CASE("execution is deterministic across runs and thread counts") {
  Fixture f;
  ExecOptions opts;
  OpContext one;
  one.threads = 1;
  OpContext four;
  four.threads = 4;
  ExecResult r1 = execute_pipeline(f.g, default_plan(f.g), nullptr, one, opts);
  ExecResult r2 = execute_pipeline(f.g, default_plan(f.g), nullptr, four, opts);
  CHECK(sink_dense(r1).v == sink_dense(r2).v);
}

TEST_CASE("seed changes the synthetic data") {
  Fixture f;
  ExecOptions opts;
  OpContext a;
  a.seed = 1;
  OpContext b;
  b.seed = 2;
  ExecResult ra = execute_pipeline(f.g, default_plan(f.g), nullptr, a, opts);
  ExecResult rb = execute_pipeline(f.g, default_plan(f.g), nullptr, b, opts);
  CHECK(sink_dense(ra).v != sink_dense(rb).v);
}

TEST_CASE("misprediction fallback opens admission caching") {
  // Predictions of ~0 make the very first computation an overrun, which
  // must flip the fallback and let reused values into the store.
  Fixture f;
  Profile p = unit_profile(f.g, default_plan(f.g));
  for (auto& n : p.nodes) n.t_sec = 1e-12;
  OpContext ctx;
  ExecOptions opts;
  opts.enable_fallback = true;
  opts.fallback_min_sec = 0.0;
  opts.budget_bytes = 64 << 20;
  ExecResult r = execute_pipeline(f.g, default_plan(f.g), &p, ctx, opts);
  CHECK(r.fallback_triggered);
}

TEST_CASE("fallback stays quiet when predictions hold") {
  Fixture f;
  Profile p = unit_profile(f.g, default_plan(f.g));
  for (auto& n : p.nodes) n.t_sec = 10.0;  // generous over-prediction
  OpContext ctx;
  ExecOptions opts;
  opts.enable_fallback = true;
  ExecResult r = execute_pipeline(f.g, default_plan(f.g), &p, ctx, opts);
  CHECK_FALSE(r.fallback_triggered);
}

TEST_CASE("trace is ordered by ascending node id with wall times") {
  Fixture f;
  OpContext ctx;
  ExecOptions opts;
  ExecResult r = execute_pipeline(f.g, default_plan(f.g), nullptr, ctx, opts);
  REQUIRE(r.trace.size() == f.g.node_count());
  for (std::size_t i = 1; i < r.trace.size(); ++i)
    CHECK(r.trace[i - 1].id < r.trace[i].id);
  for (const auto& e : r.trace) CHECK(e.measured_sec >= 0.0);
  CHECK(r.wall_sec > 0.0);
}

TEST_CASE("synthetic end-to-end pipelines run under every policy") {
  for (std::uint64_t seed : {3u, 9u}) {
    PipelineGraph g = synth_real_pipeline(seed);
    OpContext ctx;
    ctx.seed = seed;
    PlanMap plan = default_plan(g);

    ExecOptions none;
    ExecResult base = execute_pipeline(g, plan, nullptr, ctx, none);

    Profile p = unit_profile(g, plan);
    ExecOptions pin;
    pin.pinned = plan_greedy(p, 1e18);
    ExecResult cached = execute_pipeline(g, plan, nullptr, ctx, pin);

    const DenseData& a = sink_dense(base);
    const DenseData& b = sink_dense(cached);
    CHECK(a.v == b.v);

    // With an unconstrained pin set every node computes exactly once.
    SimCounts sim = simulate_counts(p, pin.pinned);
    for (const auto& e : cached.trace) {
      CHECK(static_cast<double>(e.demands) == sim.demands.at(e.id));
      CHECK(static_cast<double>(e.computes) == sim.computes.at(e.id));
    }
  }
}

}  // namespace
}  // namespace pipeplan
