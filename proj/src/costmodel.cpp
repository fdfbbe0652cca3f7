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

#include "costmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pipeplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Single-node deployments have no network links, so nothing coordinates.
double coord_or_zero(double bytes, const ClusterResourceDescriptor& r) {
  return r.workers > 1 ? bytes : 0.0;
}

}  // namespace

double combine(const CostEstimate& e, const ClusterResourceDescriptor& r) {
  const double r_exec = 1.0 / r.cpu_throughput;
  const double r_coord = 1.0 / r.net_bandwidth;
  return e.exec_units * r_exec + e.coord_bytes * r_coord;
}

bool feasible(const CostEstimate& e, const ClusterResourceDescriptor& r) {
  return e.mem_bytes <= r.mem_per_node;
}

const char* solver_impl_name(SolverImpl i) {
  switch (i) {
    case SolverImpl::kLocalQR: return "LocalQR";
    case SolverImpl::kDistQR: return "DistQR";
    case SolverImpl::kLbfgs: return "LBFGS";
    case SolverImpl::kBlockSolve: return "BlockSolve";
  }
  return "?";
}

const char* pca_impl_name(PcaImpl i) {
  switch (i) {
    case PcaImpl::kSvd: return "SVD";
    case PcaImpl::kTsvd: return "TSVD";
    case PcaImpl::kDistSvd: return "DistSVD";
    case PcaImpl::kDistTsvd: return "DistTSVD";
  }
  return "?";
}

const char* conv_impl_name(ConvImpl i) {
  switch (i) {
    case ConvImpl::kSeparable: return "Separable";
    case ConvImpl::kMatMul: return "MatMul";
    case ConvImpl::kFft: return "FFT";
  }
  return "?";
}

bool parse_solver_impl(const std::string& s, SolverImpl* out) {
  for (SolverImpl i : {SolverImpl::kLocalQR, SolverImpl::kDistQR,
                       SolverImpl::kLbfgs, SolverImpl::kBlockSolve}) {
    if (s == solver_impl_name(i)) {
      *out = i;
      return true;
    }
  }
  return false;
}

bool parse_pca_impl(const std::string& s, PcaImpl* out) {
  for (PcaImpl i : {PcaImpl::kSvd, PcaImpl::kTsvd, PcaImpl::kDistSvd,
                    PcaImpl::kDistTsvd}) {
    if (s == pca_impl_name(i)) {
      *out = i;
      return true;
    }
  }
  return false;
}

bool parse_conv_impl(const std::string& s, ConvImpl* out) {
  for (ConvImpl i :
       {ConvImpl::kSeparable, ConvImpl::kMatMul, ConvImpl::kFft}) {
    if (s == conv_impl_name(i)) {
      *out = i;
      return true;
    }
  }
  return false;
}

double ImplMultipliers::get(const std::string& impl,
                            const std::string& term) const {
  auto it = m_.find(impl + "." + term);
  return it == m_.end() ? 1.0 : it->second;
}

void ImplMultipliers::set(const std::string& impl, const std::string& term,
                          double v) {
  m_[impl + "." + term] = v;
}

CostEstimate solver_cost(SolverImpl impl, const DatasetStats& stats,
                         double iters, double block,
                         const ClusterResourceDescriptor& r,
                         const ImplMultipliers& mult) {
  const double n = stats.n, d = stats.d, k = stats.k, s = stats.s;
  const double w = r.workers, B = kBytesPerScalar, i = iters, b = block;
  CostEstimate e;
  switch (impl) {
    case SolverImpl::kLocalQR:
      e.exec_units = n * d * (d + k);
      e.coord_bytes = coord_or_zero(n * (d + k) * B, r);
      e.mem_bytes = d * (n + k) * B;
      break;
    case SolverImpl::kDistQR:
      e.exec_units = n * d * (d + k) / w;
      e.coord_bytes = coord_or_zero(d * (d + k) * B, r);
      e.mem_bytes = (n * d / w + d * d) * B;
      break;
    case SolverImpl::kLbfgs:
      e.exec_units = i * n * s * k / w;
      e.coord_bytes = coord_or_zero(i * d * k * B, r);
      e.mem_bytes = (n * s / w + d * k) * B;
      break;
    case SolverImpl::kBlockSolve:
      e.exec_units = i * n * d * (b + k) / w;
      e.coord_bytes = coord_or_zero(i * d * (b + k) * B, r);
      e.mem_bytes = (n * b / w + d * k) * B;
      break;
  }
  const char* name = solver_impl_name(impl);
  e.exec_units *= mult.get(name, "exec");
  e.coord_bytes *= mult.get(name, "coord");
  return e;
}

CostEstimate pca_cost(PcaImpl impl, const DatasetStats& stats, double k,
                      const ClusterResourceDescriptor& r,
                      const ImplMultipliers& mult) {
  const double n = stats.n, d = stats.d;
  const double w = r.workers, B = kBytesPerScalar;
  CostEstimate e;
  switch (impl) {
    case PcaImpl::kSvd:
      e.exec_units = n * d * d;
      e.mem_bytes = n * d * B;
      break;
    case PcaImpl::kTsvd:
      e.exec_units = n * k * k;
      e.mem_bytes = n * d * B;
      break;
    case PcaImpl::kDistSvd:
      e.exec_units = n * d * d / w;
      e.coord_bytes = coord_or_zero(d * d * B, r);
      e.mem_bytes = n * d * B / w;
      break;
    case PcaImpl::kDistTsvd:
      e.exec_units = n * k * k / w;
      e.coord_bytes = coord_or_zero(d * k * B, r);
      e.mem_bytes = n * d * B / w;
      break;
  }
  const char* name = pca_impl_name(impl);
  e.exec_units *= mult.get(name, "exec");
  e.coord_bytes *= mult.get(name, "coord");
  return e;
}

CostEstimate conv_cost(ConvImpl impl, double n, double chan, double b,
                       double k, const ClusterResourceDescriptor& r,
                       const ImplMultipliers& mult) {
  (void)r;
  check(k <= n, ErrorCode::kInvalidArgument,
        "filter wider than image in conv cost");
  const double m = n - k + 1;
  const double B = kBytesPerScalar;
  CostEstimate e;
  switch (impl) {
    case ConvImpl::kSeparable:
      e.exec_units = chan * b * k * m * m + b * k * k * k;
      break;
    case ConvImpl::kMatMul:
      e.exec_units = chan * b * k * k * m * m;
      break;
    case ConvImpl::kFft:
      e.exec_units =
          6.0 * chan * b * n * n * std::log2(n) + 4.0 * chan * b * n * n;
      break;
  }
  e.coord_bytes = 0;  // record-parallel, nothing crosses the network
  e.mem_bytes = chan * b * n * n * B;
  const char* name = conv_impl_name(impl);
  e.exec_units *= mult.get(name, "exec");
  return e;
}

double default_block_width(double d) {
  return std::max(1.0, std::min({d, std::max(8.0, std::round(d / 8.0)), 512.0}));
}

namespace {

template <typename Impl, typename CostFn>
void pick(PhysicalChoice* out, const std::vector<Impl>& impls,
          const std::vector<bool>& allowed, CostFn cost_of,
          const ClusterResourceDescriptor& r,
          const char* (*name_of)(Impl)) {
  double best = kInf;
  bool found = false;
  for (std::size_t idx = 0; idx < impls.size(); ++idx) {
    if (!allowed[idx]) {
      out->candidates.emplace_back(name_of(impls[idx]), kInf, false);
      continue;
    }
    CostEstimate e = cost_of(impls[idx]);
    const bool ok = feasible(e, r);
    const double c = combine(e, r);
    out->candidates.emplace_back(name_of(impls[idx]), c, ok);
    if (ok && c < best) {
      best = c;
      out->impl = name_of(impls[idx]);
      out->estimate = e;
      out->combined = c;
      found = true;
    }
  }
  check(found, ErrorCode::kInfeasible,
        "no implementation fits in per-node memory");
}

}  // namespace

PhysicalChoice choose_physical(const LogicalNode& node,
                               const DatasetStats& input_stats,
                               const ClusterResourceDescriptor& r,
                               const ImplMultipliers& mult) {
  PhysicalChoice out;
  out.effective_w = node.iteration_weight;
  if (node.kind == OpKind::kLinearSolver && node.role == Role::kEstimator) {
    const double iters = node.params.get_num("iters", 20);
    const double block =
        node.params.get_num("block", default_block_width(input_stats.d));
    out.optimizable = true;
    pick<SolverImpl>(
        &out,
        {SolverImpl::kLocalQR, SolverImpl::kDistQR, SolverImpl::kLbfgs,
         SolverImpl::kBlockSolve},
        {true, true, true, true},
        [&](SolverImpl i) {
          return solver_cost(i, input_stats, iters, block, r, mult);
        },
        r, &solver_impl_name);
    SolverImpl chosen;
    parse_solver_impl(out.impl, &chosen);
    out.effective_w = (chosen == SolverImpl::kLbfgs ||
                       chosen == SolverImpl::kBlockSolve)
                          ? static_cast<int>(iters)
                          : 1;
  } else if (node.kind == OpKind::kPca && node.role == Role::kEstimator) {
    const double k = node.params.get_num("k", 2);
    out.optimizable = true;
    pick<PcaImpl>(
        &out,
        {PcaImpl::kSvd, PcaImpl::kTsvd, PcaImpl::kDistSvd,
         PcaImpl::kDistTsvd},
        {true, true, true, true},
        [&](PcaImpl i) { return pca_cost(i, input_stats, k, r, mult); }, r,
        &pca_impl_name);
    out.effective_w = 1;
  } else if (node.kind == OpKind::kConvolution) {
    check(input_stats.image_side > 0 && input_stats.image_chan > 0,
          ErrorCode::kInvalidArgument,
          "convolution cost needs image dimensions");
    const double b = node.params.get_num("b", 1);
    const double k = node.params.get_num("k", 3);
    const bool sep = node.params.get_num("separable", 0) != 0;
    out.optimizable = true;
    pick<ConvImpl>(
        &out, {ConvImpl::kSeparable, ConvImpl::kMatMul, ConvImpl::kFft},
        {sep, true, true},
        [&](ConvImpl i) {
          return conv_cost(i, input_stats.image_side, input_stats.image_chan,
                           b, k, r, mult);
        },
        r, &conv_impl_name);
    out.effective_w = 1;
  }
  return out;
}

}  // namespace pipeplan
