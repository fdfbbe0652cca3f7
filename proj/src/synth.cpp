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

#include "synth.hpp"

#include <cmath>
#include <string>

#include "common.hpp"
#include "rng.hpp"

namespace pipeplan {

Mat random_dense(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng r(seed);
  Mat m(n, d);
  for (double& x : m.a) x = r.normal();
  return m;
}

SparseData random_sparse(std::size_t n, std::size_t d, double density,
                         std::uint64_t seed) {
  check(density > 0 && density <= 1, ErrorCode::kInvalidArgument,
        "sparse density must lie in (0, 1]");
  Rng r(seed);
  SparseData s;
  s.n = n;
  s.d = d;
  s.rows.resize(n);
  const double log_keep = std::log1p(-std::min(density, 1.0 - 1e-12));
  for (std::size_t i = 0; i < n; ++i) {
    // Geometric gaps between hits: O(nnz) draws instead of O(d).
    double j = std::floor(std::log(std::max(r.uniform(), 1e-300)) / log_keep);
    while (j < static_cast<double>(d)) {
      s.rows[i].emplace_back(static_cast<std::uint32_t>(j), r.normal());
      j += 1.0 +
           std::floor(std::log(std::max(r.uniform(), 1e-300)) / log_keep);
    }
  }
  return s;
}

ImageData random_images(std::size_t count, std::size_t side, std::size_t chan,
                        std::uint64_t seed) {
  Rng r(seed);
  ImageData img;
  img.count = count;
  img.height = side;
  img.width = side;
  img.chan = chan;
  img.v.resize(count * side * side * chan);
  for (double& x : img.v) x = r.uniform();
  return img;
}

Profile synth_profile(const SynthDagOptions& opt, std::uint64_t seed) {
  check(opt.nodes >= 2, ErrorCode::kInvalidArgument,
        "a planning instance needs at least a source and a sink");
  check(!opt.weights.empty(), ErrorCode::kInvalidArgument,
        "weight palette is empty");
  Rng r(seed);
  Profile p;
  for (int i = 0; i < opt.nodes; ++i) {
    ProfileNode n;
    n.id = static_cast<NodeId>(i);
    n.name = "v" + std::to_string(i);
    n.kind = "synth";
    if (i == 0) {
      n.role = 'S';
      n.weight = 1;
    } else {
      n.role = r.uniform() < opt.estimator_p ? 'E' : 'T';
      n.weight = opt.weights[r.below(opt.weights.size())];
    }
    n.t_sec = r.lognormal(opt.t_mu, opt.t_sigma);
    n.out_bytes = r.lognormal(opt.size_mu, opt.size_sigma);
    p.nodes.push_back(std::move(n));
  }
  for (int i = 1; i < opt.nodes; ++i) {
    p.edges.push_back({static_cast<NodeId>(i - 1), static_cast<NodeId>(i), 0});
    if (i >= 2 && r.uniform() < opt.reuse_p) {
      const NodeId extra = static_cast<NodeId>(r.below(
          static_cast<std::uint64_t>(i - 1)));
      p.edges.push_back({extra, static_cast<NodeId>(i), 1});
    }
  }
  p.sink = static_cast<NodeId>(opt.nodes - 1);
  p.scale_records = 1000;
  p.validate();
  return p;
}

double total_intermediate_bytes(const Profile& p) {
  double total = 0;
  for (const auto& n : p.nodes) total += n.out_bytes;
  return total;
}

Profile lru_pathology_profile() {
  Profile p;
  NodeId next = 0;
  auto add = [&](const std::string& name, char role, double t, double bytes,
                 const std::vector<NodeId>& ins) {
    ProfileNode n;
    n.id = next++;
    n.name = name;
    n.kind = "synth";
    n.role = role;
    n.weight = 1;
    n.t_sec = t;
    n.out_bytes = bytes;
    p.nodes.push_back(std::move(n));
    int slot = 0;
    for (NodeId u : ins) p.edges.push_back({u, p.nodes.back().id, slot++});
    return p.nodes.back().id;
  };

  // Reused values cost 1 s each; everything else is negligible.  Flood
  // sizes are placed against admission thresholds of 0.3x budget for
  // budgets 10 MB / 15 MB / 30 MB: the small flood clears the threshold
  // only at 15 MB and up, the large one only at 30 MB, and each segment's
  // flood exceeds the whole budget so the reused value is evicted before
  // its next use whenever its phase's flood is admitted.
  const double kSmall = 4.4e6;
  const double kLarge = 8.8e6;
  const NodeId src = add("src", 'S', 0.01, 1e3, {});
  const NodeId ua = add("reusedA", 'T', 1.0, 1e6, {src});
  const NodeId ub = add("reusedB", 'T', 1.0, 1e6, {src});
  NodeId prev = src;
  for (int seg = 0; seg < 4; ++seg) {
    std::vector<NodeId> ins = {prev, ua};
    for (int f = 0; f < 8; ++f) {
      ins.push_back(add("floodA" + std::to_string(seg) + "_" +
                            std::to_string(f),
                        'T', 0.01, kSmall, {src}));
    }
    prev = add("segA" + std::to_string(seg), 'T', 0.005, 1e3, ins);
  }
  for (int seg = 0; seg < 4; ++seg) {
    std::vector<NodeId> ins = {prev, ub};
    for (int f = 0; f < 4; ++f) {
      ins.push_back(add("floodB" + std::to_string(seg) + "_" +
                            std::to_string(f),
                        'T', 0.01, kLarge, {src}));
    }
    prev = add("segB" + std::to_string(seg), 'T', 0.005, 1e3, ins);
  }
  p.sink = prev;
  p.scale_records = 1000;
  p.validate();
  return p;
}

PipelineGraph synth_real_pipeline(std::uint64_t seed) {
  Rng r(seed);
  Params src_params;
  src_params.set_num("n", 1500);
  src_params.set_num("d", 8);
  PipelineGraph tip =
      PipelineGraph::source(OpKind::kDataSource, src_params, "feat");
  std::vector<PipelineGraph> pool = {tip};
  bool solved = false;

  const int steps = 4 + static_cast<int>(r.below(5));
  static const char* kFns[] = {"scale", "relu", "sqrtabs", "normalize"};
  for (int i = 0; i < steps; ++i) {
    const double roll = r.uniform();
    if (roll < 0.40 || pool.size() < 2) {
      // Extend a random branch with a per-record map.
      const PipelineGraph& base = pool[r.below(pool.size())];
      Params ps;
      ps.set("fn", kFns[r.below(4)]);
      if (r.uniform() < 0.5) ps.set_num("factor", 0.5 + r.uniform());
      if (r.uniform() < 0.3) ps.set_num("w", 2 + r.below(2));
      tip = base.and_then(OpKind::kElementMap, ps,
                          "map" + std::to_string(i));
      pool.push_back(tip);
    } else if (roll < 0.70) {
      const PipelineGraph& a = pool[r.below(pool.size())];
      const PipelineGraph& b = pool[r.below(pool.size())];
      tip = PipelineGraph::gather({&a, &b}, "gather" + std::to_string(i));
      pool.push_back(tip);
    } else if (!solved) {
      solved = true;
      const PipelineGraph& feat = pool[r.below(pool.size())];
      Params lp;
      lp.set_num("n", 1500);
      lp.set_num("classes", 2);
      PipelineGraph labels =
          PipelineGraph::source(OpKind::kLabelSource, lp, "labels");
      Params sp;
      sp.set_num("iters", 5);
      PipelineGraph fit = PipelineGraph::apply(
          OpKind::kLinearSolver, sp, {&feat, &labels}, "fit" + std::to_string(i));
      tip = PipelineGraph::apply(OpKind::kLinearSolver, Params(),
                                 {&feat, &fit}, "pred" + std::to_string(i));
      pool.push_back(tip);
    } else {
      const PipelineGraph& base = pool[r.below(pool.size())];
      Params ps;
      ps.set("fn", "relu");
      tip = base.and_then(OpKind::kElementMap, ps, "map" + std::to_string(i));
      pool.push_back(tip);
    }
  }
  return tip;
}

PipelineGraph synth_map_pipeline(std::size_t n, std::size_t d, int depth,
                                 int repeat, std::uint64_t seed) {
  check(depth >= 1, ErrorCode::kInvalidArgument, "map chain needs depth >= 1");
  Rng r(seed);
  Params src;
  src.set_num("n", static_cast<double>(n));
  src.set_num("d", static_cast<double>(d));
  PipelineGraph g = PipelineGraph::source(OpKind::kDataSource, src, "records");
  static const char* kFns[] = {"scale", "relu", "sqrtabs", "normalize"};
  for (int i = 0; i < depth; ++i) {
    Params ps;
    ps.set("fn", kFns[r.below(4)]);
    ps.set_num("repeat", repeat);
    if (r.uniform() < 0.5) ps.set_num("factor", 0.9 + 0.2 * r.uniform());
    g = g.and_then(OpKind::kElementMap, ps, "map" + std::to_string(i));
  }
  return g;
}

}  // namespace pipeplan
