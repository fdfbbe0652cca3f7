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

#ifndef PIPEPLAN_SOLVERS_HPP_
#define PIPEPLAN_SOLVERS_HPP_

#include <cstdint>

#include "matrix.hpp"
#include "values.hpp"

namespace pipeplan {

// Work counters in fused multiply-add units.  gradient_madds covers the
// forward+backward pass of each accepted L-BFGS step, objective_madds the
// extra line-search evaluations, update_madds the direction recursion and
// vector updates; the sparse path must keep gradient_madds at
// 2 * nnz * k per iteration.
struct SolverCounters {
  std::uint64_t gradient_madds = 0;
  std::uint64_t objective_madds = 0;
  std::uint64_t update_madds = 0;
  int iterations = 0;
  int ridge_blocks = 0;
};

/// Exact least-squares min ||A X - B||_F by Householder QR.
/// A: n x d with n >= d, B: n x k.  Rank deficiency raises kExecution.
Mat solve_exact_qr(const Mat& A, const Mat& B);

struct LbfgsOptions {
  int iters = 100;          ///< maximum iterations
  int history = 10;         ///< stored (s, y) pairs
  double armijo_c = 1e-4;   ///< sufficient-decrease constant
  int max_backtrack = 20;   ///< step halvings per line search
  double grad_rtol = 1e-12; ///< stop when ||g|| <= grad_rtol * (1 + ||g0||)
};

/// L-BFGS on the least-squares objective, dense features.
Mat solve_lbfgs(const Mat& A, const Mat& B, const LbfgsOptions& opt,
                SolverCounters* counters = nullptr);

/// L-BFGS with sparse features; gradient work touches only stored
/// non-zeros.
Mat solve_lbfgs(const SparseData& A, const Mat& B, const LbfgsOptions& opt,
                SolverCounters* counters = nullptr);

/// Block Gauss-Seidel: cycles over column blocks of width `block`,
/// minimizing exactly over each block (Gram + Cholesky, factored once).
/// A singular block Gram gets ridge 1e-8 * trace added (counted in
/// counters->ridge_blocks).  With block >= d one pass reproduces the exact
/// solution of a well-conditioned system.
Mat solve_block(const Mat& A, const Mat& B, std::size_t block, int passes,
                SolverCounters* counters = nullptr);

double least_squares_objective(const Mat& A, const Mat& X, const Mat& B);
double least_squares_objective(const SparseData& A, const Mat& X,
                               const Mat& B);

Mat densify(const SparseData& A);

}  // namespace pipeplan

#endif  // PIPEPLAN_SOLVERS_HPP_
