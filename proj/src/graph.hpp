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

#ifndef PIPEPLAN_GRAPH_HPP_
#define PIPEPLAN_GRAPH_HPP_

#include <map>
#include <string>
#include <vector>

#include "common.hpp"
#include "values.hpp"

namespace pipeplan {

// Operator kinds.  A fixed enumeration: the planner, profiler and executor
// all dispatch on it, and the pipeline file format names these directly.
enum class OpKind {
  kDataSource,
  kLabelSource,
  kTokenize,
  kNGrams,
  kTopKFeatures,
  kTermFrequency,
  kLinearSolver,
  kPca,
  kConvolution,
  kElementMap,
  kGather,
};

const char* op_kind_name(OpKind k);
bool parse_op_kind(const std::string& s, OpKind* out);

// Estimators fit a model from the data flowing through them and are
// pipeline breakers; transformers are record-level maps.  LinearSolver and
// Pca nodes act as estimators when fitting (no Model input) and as
// transformers when applying a model supplied on their last input slot.
enum class Role { kSource, kTransformer, kEstimator };

const char* role_name(Role r);

// Flat string parameter bag.  Values are parsed on access so that pipeline
// files round-trip untouched.
class Params {
 public:
  Params() = default;
  static Params parse_kv(const std::string& text);  // "k=v k=v ..."

  Params& set(const std::string& key, const std::string& value);
  Params& set_num(const std::string& key, double value);
  bool has(const std::string& key) const;
  std::string get_str(const std::string& key, const std::string& def) const;
  double get_num(const std::string& key, double def) const;
  // Canonical "k=v k=v" rendering with keys sorted; equal bags render
  // identically (deduplication keys on this).
  std::string canonical() const;
  const std::map<std::string, std::string>& raw() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

struct LogicalNode {
  NodeId id = 0;
  std::string name;  // display label; ignored by structural equality
  OpKind kind = OpKind::kDataSource;
  Role role = Role::kTransformer;  // resolved during graph validation
  Params params;
  // Passes the node makes over each input per evaluation.  Defaults to 1;
  // iterative estimators default to their "iters" parameter and the planner
  // overrides it once a physical implementation is chosen.
  int iteration_weight = 1;
};

struct GraphEdge {
  NodeId from = 0;
  NodeId to = 0;
  int slot = 0;
};

// Immutable pipeline DAG.  Extension returns a new graph; node ids are
// assigned once at construction, so branches built from a shared prefix
// refer to the same nodes and combining them merges by id.
class PipelineGraph {
 public:
  PipelineGraph() = default;

  // General constructor; validates shape and types.
  static PipelineGraph from_parts(std::vector<LogicalNode> nodes,
                                  std::vector<GraphEdge> edges, NodeId sink);

  // Single source node.
  static PipelineGraph source(OpKind kind, Params params,
                              const std::string& name = "");
  // New graph with `kind` appended after this graph's sink.
  PipelineGraph and_then(OpKind kind, Params params,
                         const std::string& name = "") const;
  // New graph whose added node reads input i from inputs[i]'s sink.
  static PipelineGraph apply(OpKind kind, Params params,
                             const std::vector<const PipelineGraph*>& inputs,
                             const std::string& name = "");
  // Concatenation node over >= 2 vector-like branches.
  static PipelineGraph gather(const std::vector<const PipelineGraph*>& inputs,
                              const std::string& name = "");

  const std::vector<LogicalNode>& nodes() const { return nodes_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  const LogicalNode& node(NodeId id) const;
  bool has_node(NodeId id) const;
  NodeId sink() const { return sink_; }
  std::size_t node_count() const { return nodes_.size(); }

  // Producer ids by slot.
  const std::vector<NodeId>& inputs(NodeId id) const;
  // Consumer ids, one entry per incoming edge (multiplicity preserved).
  const std::vector<NodeId>& consumers(NodeId id) const;
  // Topological order; ties broken by ascending node id.
  std::vector<NodeId> topo_order() const;
  // Edge types, resolved from sources down.
  const std::map<NodeId, TypeTag>& types() const { return types_; }
  TypeTag type_of(NodeId id) const;

  // Fresh globally unique node id.
  static NodeId next_id();

 private:
  void build_adjacency_and_validate();

  std::vector<LogicalNode> nodes_;  // ascending id
  std::vector<GraphEdge> edges_;
  NodeId sink_ = 0;
  std::map<NodeId, std::vector<NodeId>> in_by_slot_;
  std::map<NodeId, std::vector<NodeId>> out_;
  std::map<NodeId, TypeTag> types_;
};

}  // namespace pipeplan

#endif  // PIPEPLAN_GRAPH_HPP_
