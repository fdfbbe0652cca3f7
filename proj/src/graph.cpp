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

#include "graph.hpp"

#include <algorithm>
#include <atomic>
#include <set>
#include <sstream>

namespace pipeplan {

namespace {

std::atomic<NodeId> g_next_id{1};

struct KindName {
  OpKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {OpKind::kDataSource, "DataSource"},
    {OpKind::kLabelSource, "LabelSource"},
    {OpKind::kTokenize, "Tokenize"},
    {OpKind::kNGrams, "NGrams"},
    {OpKind::kTopKFeatures, "TopKFeatures"},
    {OpKind::kTermFrequency, "TermFrequency"},
    {OpKind::kLinearSolver, "LinearSolver"},
    {OpKind::kPca, "PCA"},
    {OpKind::kConvolution, "Convolution"},
    {OpKind::kElementMap, "ElementMap"},
    {OpKind::kGather, "Gather"},
};

bool is_vector_like(TypeTag t) {
  return t == TypeTag::kSparseVec || t == TypeTag::kDenseVec ||
         t == TypeTag::kDenseMatrix;
}

std::string tag_list(std::initializer_list<TypeTag> tags) {
  std::string s;
  for (TypeTag t : tags) {
    if (!s.empty()) s += "|";
    s += type_tag_name(t);
  }
  return s;
}

}  // namespace

const char* op_kind_name(OpKind k) {
  for (const auto& kn : kKindNames)
    if (kn.kind == k) return kn.name;
  return "?";
}

bool parse_op_kind(const std::string& s, OpKind* out) {
  for (const auto& kn : kKindNames) {
    if (s == kn.name) {
      *out = kn.kind;
      return true;
    }
  }
  return false;
}

const char* role_name(Role r) {
  switch (r) {
    case Role::kSource: return "Source";
    case Role::kTransformer: return "Transformer";
    case Role::kEstimator: return "Estimator";
  }
  return "?";
}

Params Params::parse_kv(const std::string& text) {
  Params p;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    auto eq = tok.find('=');
    check(eq != std::string::npos && eq > 0, ErrorCode::kParse,
          "expected key=value, got '" + tok + "'");
    p.kv_[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return p;
}

Params& Params::set(const std::string& key, const std::string& value) {
  kv_[key] = value;
  return *this;
}

Params& Params::set_num(const std::string& key, double value) {
  std::ostringstream os;
  os << value;
  kv_[key] = os.str();
  return *this;
}

bool Params::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string Params::get_str(const std::string& key,
                            const std::string& def) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? def : it->second;
}

double Params::get_num(const std::string& key, double def) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return def;
  try {
    std::size_t pos = 0;
    double v = std::stod(it->second, &pos);
    check(pos == it->second.size(), ErrorCode::kParse, "");
    return v;
  } catch (...) {
    fail(ErrorCode::kParse,
         "parameter '" + key + "' is not numeric: '" + it->second + "'");
  }
}

std::string Params::canonical() const {
  std::string s;
  for (const auto& [k, v] : kv_) {
    if (!s.empty()) s += " ";
    s += k + "=" + v;
  }
  return s;
}

NodeId PipelineGraph::next_id() { return g_next_id.fetch_add(1); }

PipelineGraph PipelineGraph::from_parts(std::vector<LogicalNode> nodes,
                                        std::vector<GraphEdge> edges,
                                        NodeId sink) {
  PipelineGraph g;
  g.nodes_ = std::move(nodes);
  g.edges_ = std::move(edges);
  g.sink_ = sink;
  std::sort(g.nodes_.begin(), g.nodes_.end(),
            [](const LogicalNode& a, const LogicalNode& b) {
              return a.id < b.id;
            });
  g.build_adjacency_and_validate();
  return g;
}

PipelineGraph PipelineGraph::source(OpKind kind, Params params,
                                    const std::string& name) {
  LogicalNode n;
  n.id = next_id();
  n.name = name.empty() ? op_kind_name(kind) + std::to_string(n.id) : name;
  n.kind = kind;
  n.params = std::move(params);
  return from_parts({n}, {}, n.id);
}

PipelineGraph PipelineGraph::and_then(OpKind kind, Params params,
                                      const std::string& name) const {
  return apply(kind, std::move(params), {this}, name);
}

PipelineGraph PipelineGraph::apply(
    OpKind kind, Params params,
    const std::vector<const PipelineGraph*>& inputs, const std::string& name) {
  check(!inputs.empty(), ErrorCode::kInvalidArgument,
        "apply needs at least one input graph");
  LogicalNode n;
  n.id = next_id();
  n.name = name.empty() ? op_kind_name(kind) + std::to_string(n.id) : name;
  n.kind = kind;
  n.params = std::move(params);

  std::map<NodeId, LogicalNode> merged;
  std::set<std::tuple<NodeId, NodeId, int>> edge_set;
  std::vector<GraphEdge> edges;
  for (const PipelineGraph* g : inputs) {
    for (const auto& m : g->nodes_) merged.emplace(m.id, m);
    for (const auto& e : g->edges_) {
      if (edge_set.insert({e.from, e.to, e.slot}).second) edges.push_back(e);
    }
  }
  merged.emplace(n.id, n);
  int slot = 0;
  for (const PipelineGraph* g : inputs)
    edges.push_back({g->sink_, n.id, slot++});
  std::vector<LogicalNode> nodes;
  nodes.reserve(merged.size());
  for (auto& [id, m] : merged) nodes.push_back(std::move(m));
  return from_parts(std::move(nodes), std::move(edges), n.id);
}

PipelineGraph PipelineGraph::gather(
    const std::vector<const PipelineGraph*>& inputs, const std::string& name) {
  check(inputs.size() >= 2, ErrorCode::kInvalidArgument,
        "Gather needs at least 2 inputs");
  return apply(OpKind::kGather, Params(), inputs, name);
}

const LogicalNode& PipelineGraph::node(NodeId id) const {
  auto it = std::lower_bound(
      nodes_.begin(), nodes_.end(), id,
      [](const LogicalNode& n, NodeId v) { return n.id < v; });
  check(it != nodes_.end() && it->id == id, ErrorCode::kInvalidArgument,
        "unknown node id " + std::to_string(id));
  return *it;
}

bool PipelineGraph::has_node(NodeId id) const {
  auto it = std::lower_bound(
      nodes_.begin(), nodes_.end(), id,
      [](const LogicalNode& n, NodeId v) { return n.id < v; });
  return it != nodes_.end() && it->id == id;
}

const std::vector<NodeId>& PipelineGraph::inputs(NodeId id) const {
  static const std::vector<NodeId> kEmpty;
  auto it = in_by_slot_.find(id);
  return it == in_by_slot_.end() ? kEmpty : it->second;
}

const std::vector<NodeId>& PipelineGraph::consumers(NodeId id) const {
  static const std::vector<NodeId> kEmpty;
  auto it = out_.find(id);
  return it == out_.end() ? kEmpty : it->second;
}

TypeTag PipelineGraph::type_of(NodeId id) const {
  auto it = types_.find(id);
  check(it != types_.end(), ErrorCode::kInternal, "untyped node");
  return it->second;
}

std::vector<NodeId> PipelineGraph::topo_order() const {
  std::map<NodeId, std::size_t> indeg;
  for (const auto& n : nodes_) indeg[n.id] = inputs(n.id).size();
  std::set<NodeId> ready;
  for (const auto& [id, k] : indeg)
    if (k == 0) ready.insert(id);
  std::vector<NodeId> order;
  order.reserve(nodes_.size());
  while (!ready.empty()) {
    NodeId id = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(id);
    for (NodeId c : consumers(id)) {
      if (--indeg[c] == 0) ready.insert(c);
    }
  }
  check(order.size() == nodes_.size(), ErrorCode::kInvalidArgument,
        "pipeline graph contains a cycle");
  return order;
}

void PipelineGraph::build_adjacency_and_validate() {
  check(!nodes_.empty(), ErrorCode::kInvalidArgument, "empty pipeline");
  std::set<NodeId> ids;
  for (const auto& n : nodes_) {
    check(ids.insert(n.id).second, ErrorCode::kInvalidArgument,
          "duplicate node id " + std::to_string(n.id));
  }
  check(ids.count(sink_) == 1, ErrorCode::kInvalidArgument,
        "sink id not present in graph");

  // Group incoming edges by slot; every slot in [0, indegree) must be
  // bound exactly once.
  std::map<NodeId, std::map<int, NodeId>> in_slots;
  for (const auto& e : edges_) {
    check(ids.count(e.from) && ids.count(e.to), ErrorCode::kInvalidArgument,
          "edge references unknown node");
    auto& slots = in_slots[e.to];
    check(slots.emplace(e.slot, e.from).second, ErrorCode::kInvalidArgument,
          "node " + node(e.to).name + " has two producers for slot " +
              std::to_string(e.slot));
  }
  in_by_slot_.clear();
  out_.clear();
  for (const auto& [id, slots] : in_slots) {
    int expect = 0;
    auto& v = in_by_slot_[id];
    for (const auto& [slot, from] : slots) {
      check(slot == expect++, ErrorCode::kInvalidArgument,
            "node " + node(id).name + " has a gap in input slots");
      v.push_back(from);
      out_[from].push_back(id);
    }
  }

  // Structural arity against kinds, then edge types from sources down.
  std::vector<NodeId> order = topo_order();

  std::size_t sink_candidates = 0;
  for (const auto& n : nodes_) {
    if (consumers(n.id).empty()) {
      ++sink_candidates;
      check(n.id == sink_, ErrorCode::kInvalidArgument,
            "node " + n.name + " has no consumer and is not the sink");
    }
  }
  check(sink_candidates == 1, ErrorCode::kInvalidArgument,
        "pipeline must have exactly one sink");

  types_.clear();
  for (NodeId id : order) {
    auto& n = const_cast<LogicalNode&>(node(id));
    const auto& ins = inputs(id);
    std::vector<TypeTag> in_tags;
    in_tags.reserve(ins.size());
    for (NodeId u : ins) in_tags.push_back(types_.at(u));

    auto want = [&](std::size_t slot, std::initializer_list<TypeTag> ok) {
      for (TypeTag t : ok)
        if (in_tags[slot] == t) return;
      fail(ErrorCode::kTypeMismatch,
           "type mismatch at " + node(ins[slot]).name + " -> " + n.name +
               " slot " + std::to_string(slot) + ": expected " +
               tag_list(ok) + ", got " + type_tag_name(in_tags[slot]));
    };
    constexpr std::size_t kNoLimit = static_cast<std::size_t>(-1);
    auto arity = [&](std::size_t lo, std::size_t hi) {
      std::string range = (hi == kNoLimit) ? "at least " + std::to_string(lo)
                          : (lo == hi)
                              ? std::to_string(lo)
                              : std::to_string(lo) + ".." + std::to_string(hi);
      check(ins.size() >= lo && ins.size() <= hi, ErrorCode::kInvalidArgument,
            n.name + " (" + op_kind_name(n.kind) + ") takes " + range +
                " inputs, got " + std::to_string(ins.size()));
    };

    Role role = Role::kTransformer;
    TypeTag out = TypeTag::kDenseVec;
    switch (n.kind) {
      case OpKind::kDataSource: {
        arity(0, 0);
        role = Role::kSource;
        const std::string f = n.params.get_str("format", "dense");
        if (f == "text") out = TypeTag::kText;
        else if (f == "sparse") out = TypeTag::kSparseVec;
        else if (f == "images") out = TypeTag::kImage;
        else if (f == "dense" || f == "csv") out = TypeTag::kDenseMatrix;
        else
          fail(ErrorCode::kParse, "unknown DataSource format '" + f + "'");
        break;
      }
      case OpKind::kLabelSource:
        arity(0, 0);
        role = Role::kSource;
        out = TypeTag::kLabels;
        break;
      case OpKind::kTokenize:
        arity(1, 1);
        want(0, {TypeTag::kText});
        out = TypeTag::kText;
        break;
      case OpKind::kNGrams:
        arity(1, 1);
        want(0, {TypeTag::kText});
        out = TypeTag::kText;
        break;
      case OpKind::kTopKFeatures:
        arity(1, 1);
        want(0, {TypeTag::kText});
        role = Role::kEstimator;
        out = TypeTag::kModel;
        break;
      case OpKind::kTermFrequency:
        arity(2, 2);
        want(0, {TypeTag::kText});
        want(1, {TypeTag::kModel});
        out = TypeTag::kSparseVec;
        break;
      case OpKind::kLinearSolver:
        arity(2, 2);
        want(0, {TypeTag::kSparseVec, TypeTag::kDenseVec,
                 TypeTag::kDenseMatrix});
        want(1, {TypeTag::kLabels, TypeTag::kModel});
        if (in_tags[1] == TypeTag::kLabels) {
          role = Role::kEstimator;
          out = TypeTag::kModel;
        } else {
          out = TypeTag::kDenseMatrix;  // predictions
        }
        break;
      case OpKind::kPca:
        arity(1, 2);
        want(0, {TypeTag::kDenseVec, TypeTag::kDenseMatrix});
        if (ins.size() == 1) {
          role = Role::kEstimator;
          out = TypeTag::kModel;
        } else {
          want(1, {TypeTag::kModel});
          out = TypeTag::kDenseVec;
        }
        break;
      case OpKind::kConvolution:
        arity(1, 1);
        want(0, {TypeTag::kImage});
        out = TypeTag::kImage;
        break;
      case OpKind::kElementMap: {
        arity(1, 1);
        const std::string fn = n.params.get_str("fn", "scale");
        if (fn == "grayscale" || fn == "pool2") {
          want(0, {TypeTag::kImage});
          out = TypeTag::kImage;
        } else if (fn == "flatten") {
          want(0, {TypeTag::kImage});
          out = TypeTag::kDenseVec;
        } else if (fn == "scale" || fn == "relu" || fn == "sqrtabs" ||
                   fn == "normalize") {
          want(0, {TypeTag::kDenseVec, TypeTag::kDenseMatrix});
          out = in_tags[0];
        } else {
          fail(ErrorCode::kParse, "unknown ElementMap fn '" + fn + "'");
        }
        break;
      }
      case OpKind::kGather: {
        arity(2, kNoLimit);
        bool sparse = false;
        for (std::size_t s = 0; s < ins.size(); ++s) {
          check(is_vector_like(in_tags[s]), ErrorCode::kTypeMismatch,
                "type mismatch at " + node(ins[s]).name + " -> " + n.name +
                    " slot " + std::to_string(s) + ": expected " +
                    tag_list({TypeTag::kSparseVec, TypeTag::kDenseVec,
                              TypeTag::kDenseMatrix}) +
                    ", got " + type_tag_name(in_tags[s]));
          sparse = sparse || in_tags[s] == TypeTag::kSparseVec;
        }
        out = sparse ? TypeTag::kSparseVec : TypeTag::kDenseVec;
        break;
      }
    }
    n.role = role;
    if (n.params.has("w")) {
      n.iteration_weight = static_cast<int>(n.params.get_num("w", 1));
    } else if (n.kind == OpKind::kLinearSolver && role == Role::kEstimator) {
      n.iteration_weight = static_cast<int>(n.params.get_num("iters", 20));
    } else {
      n.iteration_weight = 1;
    }
    check(n.iteration_weight >= 1, ErrorCode::kInvalidArgument,
          "iteration weight must be >= 1");
    types_[id] = out;
  }
}

}  // namespace pipeplan
