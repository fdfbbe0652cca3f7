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

#ifndef PIPEPLAN_PROFILER_HPP_
#define PIPEPLAN_PROFILER_HPP_

#include <map>
#include <set>
#include <string>
#include <vector>

#include "graph.hpp"
#include "ops.hpp"

namespace pipeplan {

// Physical route and pass multiplicity chosen for one node.  weight is
// how many times each computation of the node scans its inputs (and how
// many internal passes its own time divides into).
struct NodePlan {
  std::string impl;
  int weight = 1;
};

using PlanMap = std::map<NodeId, NodePlan>;

// Baseline routes: exact solves, exact factorization, patch-matrix
// convolution.  Weight honors an explicit w param, else 1 for one-pass
// routes.
PlanMap default_plan(const PipelineGraph& g);

// One node of a captured profile.  Times are per pass at full scale;
// an execution of the node costs weight * t_sec.
struct ProfileNode {
  NodeId id = 0;
  std::string name;
  std::string kind;
  std::string impl;
  char role = 'T';  // 'S'ource, 'T'ransformer, 'E'stimator
  int weight = 1;
  double t_sec = 0;
  double out_bytes = 0;
  DatasetStats stats;  // output shape at full scale
};

// Self-contained snapshot: topology plus per-node estimates, enough to
// replay planning without the pipeline or its data.
struct Profile {
  std::vector<ProfileNode> nodes;  // ascending id
  std::vector<GraphEdge> edges;
  NodeId sink = 0;
  double scale_records = 0;  // record count the estimates are scaled to

  bool has(NodeId id) const;
  const ProfileNode& node(NodeId id) const;
  ProfileNode& node(NodeId id);
  std::vector<NodeId> topo_order() const;
  // Input node per slot / consumers with multiplicity, from the edge list.
  std::vector<NodeId> inputs(NodeId id) const;
  std::vector<NodeId> consumers(NodeId id) const;
  void validate() const;
};

struct ProfileOptions {
  std::size_t sample_small = 512;
  std::size_t sample_large = 1024;
  int reps = 3;  // timings take the median of this many runs
};

// Runs the pipeline twice on seeded record samples, times every operator
// (exclusive of its inputs), and extrapolates time and output size
// linearly to the full record count.  Estimator output sizes take the
// larger sample's measurement instead (model size does not grow with n).
// Source times include a modeled disk re-read of the full payload.
Profile profile_pipeline(const PipelineGraph& g, const PlanMap& plan,
                         const OpContext& ctx, const ProfileOptions& opts);

// Output shape stats per node from the larger sample, scaled to full
// record count; feeds operator selection.
std::map<NodeId, DatasetStats> profile_stats(const Profile& p);

}  // namespace pipeplan

#endif  // PIPEPLAN_PROFILER_HPP_
