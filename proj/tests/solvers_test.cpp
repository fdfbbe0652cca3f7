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
#include <cstdint>

#include "matrix.hpp"
#include "rng.hpp"
#include "solvers.hpp"

namespace pipeplan {
namespace {

Mat random_mat(int rows, int cols, Rng* rng) {
  Mat m(rows, cols);
  for (double& v : m.a) v = rng->normal();
  return m;
}

SparseData random_sparse(std::size_t n, std::size_t d, double density,
                         Rng* rng) {
  SparseData s;
  s.n = n;
  s.d = d;
  s.rows.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < d; ++j)
      if (rng->uniform() < density) s.rows[i].push_back({j, rng->normal()});
  return s;
}

double max_abs_diff(const Mat& a, const Mat& b) {
  REQUIRE(a.rows == b.rows);
  REQUIRE(a.cols == b.cols);
  double m = 0.0;
  for (size_t i = 0; i < a.a.size(); ++i)
    m = std::max(m, std::abs(a.a[i] - b.a[i]));
  return m;
}

TEST_CASE("solve_exact_qr matches normal equations oracle") {
  Rng rng(31);
  int n = 80, d = 10, k = 4;
  Mat a = random_mat(n, d, &rng);
  Mat b = random_mat(n, k, &rng);

  Mat x = solve_exact_qr(a, b);

  Mat gram = matmul_at_b(a, a);
  Mat rhs = matmul_at_b(a, b);
  Mat l(d, d);
  REQUIRE(cholesky(gram, &l));
  Mat x_ne = cholesky_solve(l, rhs);
  CHECK(max_abs_diff(x, x_ne) < 1e-9);
}

TEST_CASE("lbfgs reaches the exact optimum on a well conditioned problem") {
  Rng rng(32);
  int n = 120, d = 12, k = 3;
  Mat a = random_mat(n, d, &rng);
  Mat b = random_mat(n, k, &rng);

  Mat x_star = solve_exact_qr(a, b);
  LbfgsOptions opt;
  opt.iters = 200;
  Mat x = solve_lbfgs(a, b, opt);

  double f_star = least_squares_objective(a, x_star, b);
  double f = least_squares_objective(a, x, b);
  CHECK(f <= f_star * (1.0 + 1e-8) + 1e-12);
  CHECK(max_abs_diff(x, x_star) < 1e-5);
}

TEST_CASE("lbfgs dense and sparse paths agree on the same data") {
  Rng rng(33);
  SparseData sp = random_sparse(90, 15, 0.2, &rng);
  Mat b = random_mat(90, 2, &rng);
  Mat dense = densify(sp);
  REQUIRE(dense.rows == 90);
  REQUIRE(dense.cols == 15);

  LbfgsOptions opt;
  opt.iters = 40;
  SolverCounters cd, cs;
  Mat xd = solve_lbfgs(dense, b, opt, &cd);
  Mat xs = solve_lbfgs(sp, b, opt, &cs);

  // Skipping explicit zeros cannot change any partial sum, so the two
  // trajectories are numerically identical, not merely close.
  CHECK(max_abs_diff(xd, xs) < 1e-12);
  CHECK(cd.iterations == cs.iterations);
}

TEST_CASE("sparse gradient work is 2 nnz k per iteration") {
  Rng rng(34);
  SparseData sp = random_sparse(60, 20, 0.15, &rng);
  Mat b = random_mat(60, 3, &rng);

  LbfgsOptions opt;
  opt.iters = 25;
  SolverCounters c;
  solve_lbfgs(sp, b, opt, &c);

  REQUIRE(c.iterations > 0);
  // One evaluation per accepted step plus the startup gradient at X0.
  std::uint64_t per_eval = 2ULL * sp.nnz() * 3ULL;
  CHECK(c.gradient_madds ==
        per_eval * static_cast<std::uint64_t>(c.iterations + 1));
}

TEST_CASE("dense gradient work scales with the full matrix") {
  Rng rng(35);
  int n = 50, d = 10, k = 2;
  Mat a = random_mat(n, d, &rng);
  Mat b = random_mat(n, k, &rng);

  LbfgsOptions opt;
  opt.iters = 10;
  SolverCounters c;
  solve_lbfgs(a, b, opt, &c);

  REQUIRE(c.iterations > 0);
  std::uint64_t per_eval = 2ULL * n * d * k;
  CHECK(c.gradient_madds ==
        per_eval * static_cast<std::uint64_t>(c.iterations + 1));
}

TEST_CASE("solve_block with block >= d solves exactly in one pass") {
  Rng rng(36);
  int n = 70, d = 9, k = 2;
  Mat a = random_mat(n, d, &rng);
  Mat b = random_mat(n, k, &rng);

  Mat x_star = solve_exact_qr(a, b);
  Mat x = solve_block(a, b, d, 1);
  CHECK(max_abs_diff(x, x_star) < 1e-9);
}

TEST_CASE("solve_block objective is monotone in passes") {
  Rng rng(37);
  int n = 100, d = 20, k = 2;
  Mat a = random_mat(n, d, &rng);
  Mat b = random_mat(n, k, &rng);

  double prev = least_squares_objective(a, Mat(d, k), b);
  for (int passes = 1; passes <= 6; ++passes) {
    Mat x = solve_block(a, b, 5, passes);
    double f = least_squares_objective(a, x, b);
    CHECK(f <= prev * (1.0 + 1e-12));
    prev = f;
  }

  // Enough passes of narrow blocks drive the objective to the optimum.
  Mat x_star = solve_exact_qr(a, b);
  double f_star = least_squares_objective(a, x_star, b);
  Mat x = solve_block(a, b, 5, 60);
  double f = least_squares_objective(a, x, b);
  CHECK(f <= f_star * (1.0 + 1e-6) + 1e-12);
}

TEST_CASE("solve_block adds ridge on a singular block Gram") {
  Rng rng(38);
  int n = 40, d = 6, k = 1;
  Mat a = random_mat(n, d, &rng);
  for (int i = 0; i < n; ++i) a.at(i, 1) = a.at(i, 0);  // collinear pair
  Mat b = random_mat(n, k, &rng);

  SolverCounters c;
  Mat x = solve_block(a, b, 3, 2, &c);
  CHECK(c.ridge_blocks > 0);
  CHECK(std::isfinite(least_squares_objective(a, x, b)));
}

TEST_CASE("objective agrees between dense and sparse forms") {
  Rng rng(39);
  SparseData sp = random_sparse(30, 8, 0.3, &rng);
  Mat b = random_mat(30, 2, &rng);
  Mat x = random_mat(8, 2, &rng);
  double fs = least_squares_objective(sp, x, b);
  double fd = least_squares_objective(densify(sp), x, b);
  CHECK(fs == doctest::Approx(fd).epsilon(1e-13));
}

TEST_CASE("densify round trips stored entries") {
  SparseData sp;
  sp.n = 2;
  sp.d = 4;
  sp.rows = {{{1, 2.5}, {3, -1.0}}, {{0, 7.0}}};
  Mat dense = densify(sp);
  CHECK(dense.at(0, 0) == 0.0);
  CHECK(dense.at(0, 1) == 2.5);
  CHECK(dense.at(0, 3) == -1.0);
  CHECK(dense.at(1, 0) == 7.0);
  CHECK(dense.at(1, 2) == 0.0);
  CHECK(sp.nnz() == 3);
}

}  // namespace
}  // namespace pipeplan
