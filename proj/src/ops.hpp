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

#ifndef PIPEPLAN_OPS_HPP_
#define PIPEPLAN_OPS_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "costmodel.hpp"
#include "graph.hpp"
#include "values.hpp"

namespace pipeplan {

// External payloads for sources that read files.  The driver loads each
// path once and binds it to the node id; evaluation then hands out the
// shared value without copying.
struct DataBindings {
  std::map<NodeId, ValuePtr> by_node;
};

struct OpContext {
  const ClusterResourceDescriptor* cluster = nullptr;
  const DataBindings* bindings = nullptr;
  int threads = 1;
  std::uint64_t seed = 0;
};

// Runs fn over [0, n) split into contiguous chunks, one per thread.
// Output written by index, so results do not depend on thread count.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, std::size_t)>& fn);

// Evaluates one operator.  impl names the physical route for nodes that
// have several ("LocalQR", "LBFGS", "SVD", "FFT", ...); pass "" for
// single-implementation operators.  Deterministic: equal inputs, seed,
// and impl give bit-identical output regardless of thread count.
ValuePtr eval_op(const LogicalNode& node, TypeTag out_tag,
                 const std::vector<ValuePtr>& inputs, const OpContext& ctx,
                 const std::string& impl);

// Materializes a source node: the bound payload when one exists,
// otherwise synthetic data described by the node params (kind, n, d, ...).
ValuePtr generate_source(const LogicalNode& node, const OpContext& ctx);

// Keeps only the given record indices, in order.  Model values pass
// through unchanged (they are not record shaped).
ValuePtr slice_records(const ValuePtr& v, const std::vector<std::size_t>& idx);

// Seed stream for an operator, stable under node renumbering so merged
// duplicate nodes draw the same stream as the originals.
std::uint64_t op_seed(const LogicalNode& node, std::uint64_t pipeline_seed);

}  // namespace pipeplan

#endif  // PIPEPLAN_OPS_HPP_
