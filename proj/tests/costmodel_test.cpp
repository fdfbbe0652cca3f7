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
#include <string>
#include <tuple>

#include "costmodel.hpp"
#include "graph.hpp"

namespace pipeplan {
namespace {

ClusterResourceDescriptor desk() {
  ClusterResourceDescriptor r;
  r.workers = 1;
  r.cpu_throughput = 2e9;
  r.net_bandwidth = 1e9;
  r.mem_per_node = 4e9;
  return r;
}

ClusterResourceDescriptor cluster16() {
  ClusterResourceDescriptor r;
  r.workers = 16;
  r.cpu_throughput = 2e9;
  r.net_bandwidth = 1e9;
  r.mem_per_node = 32e9;
  return r;
}

DatasetStats dense_stats(double n, double d, double k = 1) {
  DatasetStats s;
  s.n = n;
  s.d = d;
  s.k = k;
  s.s = d;  // dense: every coordinate stored
  s.bytes_per_record = d * kBytesPerScalar;
  return s;
}

LogicalNode solver_node(const std::string& params) {
  LogicalNode n;
  n.kind = OpKind::kLinearSolver;
  n.role = Role::kEstimator;
  n.params = Params::parse_kv(params);
  n.iteration_weight = static_cast<int>(n.params.get_num("iters", 20));
  return n;
}

LogicalNode pca_node(const std::string& params) {
  LogicalNode n;
  n.kind = OpKind::kPca;
  n.role = Role::kEstimator;
  n.params = Params::parse_kv(params);
  return n;
}

LogicalNode conv_node(const std::string& params) {
  LogicalNode n;
  n.kind = OpKind::kConvolution;
  n.role = Role::kTransformer;
  n.params = Params::parse_kv(params);
  return n;
}

TEST_CASE("combine weights exec and coordination by throughputs") {
  ClusterResourceDescriptor r = cluster16();
  CostEstimate e;
  e.exec_units = 4e9;  // 2 seconds of compute
  e.coord_bytes = 5e8; // 0.5 seconds of traffic
  CHECK(combine(e, r) == doctest::Approx(2.5));
  e.mem_bytes = r.mem_per_node + 1;
  CHECK_FALSE(feasible(e, r));
  e.mem_bytes = r.mem_per_node;
  CHECK(feasible(e, r));
}

TEST_CASE("single worker deployments have zero coordination cost") {
  ImplMultipliers unit;
  DatasetStats s = dense_stats(1e4, 100, 2);
  CostEstimate one = solver_cost(SolverImpl::kLocalQR, s, 20, 16, desk(), unit);
  CHECK(one.coord_bytes == 0.0);
  CostEstimate many =
      solver_cost(SolverImpl::kLocalQR, s, 20, 16, cluster16(), unit);
  CHECK(many.coord_bytes > 0.0);
}

TEST_CASE("solver cost formulas match hand arithmetic") {
  ImplMultipliers unit;
  ClusterResourceDescriptor r = cluster16();
  DatasetStats s = dense_stats(1000, 50, 4);
  const double B = kBytesPerScalar;

  CostEstimate qr = solver_cost(SolverImpl::kLocalQR, s, 20, 10, r, unit);
  CHECK(qr.exec_units == doctest::Approx(1000.0 * 50 * 54));
  CHECK(qr.coord_bytes == doctest::Approx(1000.0 * 54 * B));

  CostEstimate dqr = solver_cost(SolverImpl::kDistQR, s, 20, 10, r, unit);
  CHECK(dqr.exec_units == doctest::Approx(1000.0 * 50 * 54 / 16));
  CHECK(dqr.coord_bytes == doctest::Approx(50.0 * 54 * B));

  CostEstimate lb = solver_cost(SolverImpl::kLbfgs, s, 20, 10, r, unit);
  CHECK(lb.exec_units == doctest::Approx(20.0 * 1000 * 50 * 4 / 16));
  CHECK(lb.coord_bytes == doctest::Approx(20.0 * 50 * 4 * B));

  CostEstimate bs = solver_cost(SolverImpl::kBlockSolve, s, 20, 10, r, unit);
  CHECK(bs.exec_units == doctest::Approx(20.0 * 1000 * 50 * 14 / 16));
  CHECK(bs.coord_bytes == doctest::Approx(20.0 * 50 * 14 * B));

  // Sparsity enters only through the gradient pass of the iterative route.
  DatasetStats sp = s;
  sp.s = 5;  // 10% of d
  CostEstimate lbs = solver_cost(SolverImpl::kLbfgs, sp, 20, 10, r, unit);
  CHECK(lbs.exec_units == doctest::Approx(20.0 * 1000 * 5 * 4 / 16));
}

TEST_CASE("multipliers scale exec and coord terms independently") {
  ImplMultipliers m;
  m.set("LocalQR", "exec", 3.0);
  m.set("LocalQR", "coord", 0.5);
  ClusterResourceDescriptor r = cluster16();
  DatasetStats s = dense_stats(100, 10, 1);
  ImplMultipliers unit;
  CostEstimate base = solver_cost(SolverImpl::kLocalQR, s, 1, 1, r, unit);
  CostEstimate scaled = solver_cost(SolverImpl::kLocalQR, s, 1, 1, r, m);
  CHECK(scaled.exec_units == doctest::Approx(3.0 * base.exec_units));
  CHECK(scaled.coord_bytes == doctest::Approx(0.5 * base.coord_bytes));
  CHECK(scaled.mem_bytes == doctest::Approx(base.mem_bytes));
}

TEST_CASE("pca cost formulas match hand arithmetic") {
  ImplMultipliers unit;
  ClusterResourceDescriptor r = cluster16();
  DatasetStats s = dense_stats(2000, 300);
  const double B = kBytesPerScalar;

  CHECK(pca_cost(PcaImpl::kSvd, s, 8, r, unit).exec_units ==
        doctest::Approx(2000.0 * 300 * 300));
  CHECK(pca_cost(PcaImpl::kTsvd, s, 8, r, unit).exec_units ==
        doctest::Approx(2000.0 * 8 * 8));
  CostEstimate dsvd = pca_cost(PcaImpl::kDistSvd, s, 8, r, unit);
  CHECK(dsvd.exec_units == doctest::Approx(2000.0 * 300 * 300 / 16));
  CHECK(dsvd.coord_bytes == doctest::Approx(300.0 * 300 * B));
  CHECK(pca_cost(PcaImpl::kDistTsvd, s, 8, r, unit).coord_bytes ==
        doctest::Approx(300.0 * 8 * B));
}

TEST_CASE("conv cost formulas match hand arithmetic") {
  ImplMultipliers unit;
  ClusterResourceDescriptor r = desk();
  // n=32, chan=3, b=4, k=5 -> m=28.
  CHECK(conv_cost(ConvImpl::kMatMul, 32, 3, 4, 5, r, unit).exec_units ==
        doctest::Approx(3.0 * 4 * 25 * 784));
  CHECK(conv_cost(ConvImpl::kSeparable, 32, 3, 4, 5, r, unit).exec_units ==
        doctest::Approx(3.0 * 4 * 5 * 784 + 4.0 * 125));
  double fft = conv_cost(ConvImpl::kFft, 32, 3, 4, 5, r, unit).exec_units;
  CHECK(fft == doctest::Approx(6.0 * 3 * 4 * 1024 * 5 + 4.0 * 3 * 4 * 1024));
  // FFT work does not depend on the filter side.
  CHECK(conv_cost(ConvImpl::kFft, 32, 3, 4, 9, r, unit).exec_units ==
        doctest::Approx(fft));
  // A filter wider than the image is rejected.
  CHECK_THROWS_AS(conv_cost(ConvImpl::kMatMul, 4, 1, 1, 5, r, unit), Error);
}

TEST_CASE("selection: sparse tall problems pick the iterative solver") {
  ImplMultipliers unit;
  DatasetStats s = dense_stats(1e5, 1000, 1);
  s.s = 10;  // 1% sparse
  PhysicalChoice c =
      choose_physical(solver_node("iters=20"), s, cluster16(), unit);
  REQUIRE(c.optimizable);
  CHECK(c.impl == "LBFGS");
  CHECK(c.effective_w == 20);
  REQUIRE(c.candidates.size() == 4);
  CHECK(std::get<0>(c.candidates[0]) == "LocalQR");
  CHECK(std::get<0>(c.candidates[1]) == "DistQR");
  CHECK(std::get<0>(c.candidates[2]) == "LBFGS");
  CHECK(std::get<0>(c.candidates[3]) == "BlockSolve");
}

TEST_CASE("selection: exact routes keep effective weight 1") {
  // Many targets make the per-iteration gradient expensive, so the exact
  // factorization wins once k is large enough.
  ImplMultipliers m;
  m.set("LBFGS", "exec", 50.0);  // calibrated-up iterative constant
  m.set("BlockSolve", "exec", 50.0);
  DatasetStats s = dense_stats(5000, 200, 100);
  PhysicalChoice c =
      choose_physical(solver_node("iters=100"), s, cluster16(), m);
  CHECK((c.impl == "LocalQR" || c.impl == "DistQR"));
  CHECK(c.effective_w == 1);
}

TEST_CASE("selection honors per node memory: local flips to distributed") {
  ImplMultipliers unit;
  DatasetStats s = dense_stats(4e6, 100, 1);
  ClusterResourceDescriptor r = cluster16();
  // LocalQR needs d*(n+k)*8 = 3.2e9; starve it while DistQR's share fits.
  r.mem_per_node = 1e9;
  PhysicalChoice c = choose_physical(solver_node("iters=20"), s, r, unit);
  bool local_feasible = true;
  for (const auto& cand : c.candidates)
    if (std::get<0>(cand) == "LocalQR") local_feasible = std::get<2>(cand);
  CHECK_FALSE(local_feasible);
  CHECK(c.impl != "LocalQR");

  // Nothing fits at all: kInfeasible.
  r.mem_per_node = 100.0;
  try {
    choose_physical(solver_node("iters=20"), s, r, unit);
    FAIL("expected infeasibility");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInfeasible);
  }
}

TEST_CASE("selection: small component counts pick the randomized pca") {
  ImplMultipliers unit;
  DatasetStats s = dense_stats(5e4, 400);
  PhysicalChoice c = choose_physical(pca_node("k=5"), s, desk(), unit);
  REQUIRE(c.optimizable);
  CHECK(c.impl == "TSVD");
  // With k close to d the randomized sketch loses its edge; exact SVD ties
  // and wins on enumeration order.
  PhysicalChoice full = choose_physical(pca_node("k=400"), s, desk(), unit);
  CHECK(full.impl == "SVD");
}

TEST_CASE("selection: convolution flips from matmul to fft with filter size") {
  ImplMultipliers unit;
  DatasetStats s;
  s.n = 100;
  s.image_side = 32;
  s.image_chan = 3;
  PhysicalChoice small =
      choose_physical(conv_node("b=4 k=3"), s, desk(), unit);
  CHECK(small.impl == "MatMul");
  PhysicalChoice big = choose_physical(conv_node("b=4 k=9"), s, desk(), unit);
  CHECK(big.impl == "FFT");
}

TEST_CASE("separable route is gated by the separable parameter") {
  ImplMultipliers unit;
  DatasetStats s;
  s.n = 100;
  s.image_side = 32;
  s.image_chan = 3;
  PhysicalChoice off = choose_physical(conv_node("b=4 k=5"), s, desk(), unit);
  bool sep_allowed = true;
  for (const auto& cand : off.candidates)
    if (std::get<0>(cand) == "Separable") sep_allowed = std::get<2>(cand);
  CHECK_FALSE(sep_allowed);
  CHECK(off.impl != "Separable");

  PhysicalChoice on =
      choose_physical(conv_node("b=4 k=5 separable=1"), s, desk(), unit);
  CHECK(on.impl == "Separable");
}

TEST_CASE("convolution selection requires image dimensions") {
  ImplMultipliers unit;
  DatasetStats s = dense_stats(100, 10);
  try {
    choose_physical(conv_node("b=2 k=3"), s, desk(), unit);
    FAIL("expected missing image dims error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidArgument);
  }
}

TEST_CASE("non optimizable nodes pass through untouched") {
  LogicalNode n;
  n.kind = OpKind::kTokenize;
  n.role = Role::kTransformer;
  ImplMultipliers unit;
  PhysicalChoice c = choose_physical(n, dense_stats(10, 2), desk(), unit);
  CHECK_FALSE(c.optimizable);
  CHECK(c.candidates.empty());

  // Solver applying an existing model is a plain transformer.
  LogicalNode apply;
  apply.kind = OpKind::kLinearSolver;
  apply.role = Role::kTransformer;
  PhysicalChoice ca = choose_physical(apply, dense_stats(10, 2), desk(), unit);
  CHECK_FALSE(ca.optimizable);
}

TEST_CASE("impl name parsing round trips and rejects unknowns") {
  SolverImpl si;
  CHECK(parse_solver_impl("BlockSolve", &si));
  CHECK(si == SolverImpl::kBlockSolve);
  CHECK_FALSE(parse_solver_impl("blocksolve", &si));
  PcaImpl pi;
  CHECK(parse_pca_impl("DistTSVD", &pi));
  CHECK(pi == PcaImpl::kDistTsvd);
  ConvImpl ci;
  CHECK(parse_conv_impl("Separable", &ci));
  CHECK(ci == ConvImpl::kSeparable);
  CHECK_FALSE(parse_conv_impl("Conv", &ci));
}

TEST_CASE("default block width clamps sensibly") {
  CHECK(default_block_width(4) == 4.0);       // never wider than d
  CHECK(default_block_width(64) == 8.0);      // floor of 8
  CHECK(default_block_width(800) == 100.0);   // d / 8 in the middle
  CHECK(default_block_width(1e5) == 512.0);   // hard cap
}

}  // namespace
}  // namespace pipeplan
