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

#ifndef PIPEPLAN_COSTMODEL_HPP_
#define PIPEPLAN_COSTMODEL_HPP_

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "graph.hpp"
#include "values.hpp"

namespace pipeplan {

// What the deployment looks like.  Throughputs come from microbenchmarks
// (see calibrate.hpp) or a saved descriptor file; workers and network are
// configuration, not measurement.
struct ClusterResourceDescriptor {
  double workers = 1;
  double cpu_throughput = 2e9;   // scalar fused multiply-adds per second
  double mem_bandwidth = 1e10;   // bytes per second
  double disk_bandwidth = 2e8;   // bytes per second
  double net_bandwidth = 1e9;    // bytes per second, most loaded link
  double mem_per_node = 4e9;     // bytes of usable memory per node
};

// Execution/coordination split.  exec_units counts scalar operations,
// coord_bytes counts traffic over the most loaded link, mem_bytes is the
// peak per-node footprint.  Memory is a feasibility constraint, never a
// term in the combined cost.
struct CostEstimate {
  double exec_units = 0;
  double coord_bytes = 0;
  double mem_bytes = 0;
};

// Seconds estimate: exec and coordination each weighted by the reciprocal
// of the resource's throughput.
double combine(const CostEstimate& e, const ClusterResourceDescriptor& r);

bool feasible(const CostEstimate& e, const ClusterResourceDescriptor& r);

enum class SolverImpl { kLocalQR, kDistQR, kLbfgs, kBlockSolve };
enum class PcaImpl { kSvd, kTsvd, kDistSvd, kDistTsvd };
enum class ConvImpl { kSeparable, kMatMul, kFft };

const char* solver_impl_name(SolverImpl);
const char* pca_impl_name(PcaImpl);
const char* conv_impl_name(ConvImpl);
bool parse_solver_impl(const std::string&, SolverImpl*);
bool parse_pca_impl(const std::string&, PcaImpl*);
bool parse_conv_impl(const std::string&, ConvImpl*);

// Per-implementation calibration multipliers applied to the unit-constant
// formulas.  Keyed "<ImplName>.exec" / "<ImplName>.coord"; missing keys
// mean 1.0.  Produced by fit_multipliers() or loaded from a descriptor
// file.
class ImplMultipliers {
 public:
  double get(const std::string& impl, const std::string& term) const;
  void set(const std::string& impl, const std::string& term, double v);
  const std::map<std::string, double>& raw() const { return m_; }

 private:
  std::map<std::string, double> m_;
};

// Least-squares costs per implementation.  iters is the pass count for the
// iterative methods; block is the column block width for the block solver.
CostEstimate solver_cost(SolverImpl impl, const DatasetStats& stats,
                         double iters, double block,
                         const ClusterResourceDescriptor& r,
                         const ImplMultipliers& mult);

CostEstimate pca_cost(PcaImpl impl, const DatasetStats& stats, double k,
                      const ClusterResourceDescriptor& r,
                      const ImplMultipliers& mult);

// n-by-n images with chan channels, filtered by a bank of b k-by-k
// filters.  separable_ok gates the separable implementation.
CostEstimate conv_cost(ConvImpl impl, double n, double chan, double b,
                       double k, const ClusterResourceDescriptor& r,
                       const ImplMultipliers& mult);

// Outcome of operator-level selection for one node.
struct PhysicalChoice {
  bool optimizable = false;
  std::string impl;       // chosen implementation name
  CostEstimate estimate;  // its cost at full scale
  double combined = 0;    // combined seconds
  int effective_w = 1;    // passes over inputs the chosen impl makes
  // (name, combined seconds, feasible) per candidate, enumeration order.
  std::vector<std::tuple<std::string, double, bool>> candidates;
};

// Picks the feasible implementation with the least combined cost for an
// optimizable node (LinearSolver fit, Pca fit, Convolution); ties resolve
// to the earliest enumeration tag.  Fails with kInfeasible when nothing
// fits in memory.
PhysicalChoice choose_physical(const LogicalNode& node,
                               const DatasetStats& input_stats,
                               const ClusterResourceDescriptor& r,
                               const ImplMultipliers& mult);

// Default block width for the block solver when the node does not pin one.
double default_block_width(double d);

}  // namespace pipeplan

#endif  // PIPEPLAN_COSTMODEL_HPP_
