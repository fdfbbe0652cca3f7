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
#include <vector>

#include "common.hpp"
#include "matrix.hpp"
#include "rng.hpp"

namespace pipeplan {
namespace {

Mat random_mat(int rows, int cols, Rng* rng) {
  Mat m(rows, cols);
  for (double& v : m.a) v = rng->normal();
  return m;
}

// Straightforward triple loop, kept independent of the library routine.
Mat naive_matmul(const Mat& a, const Mat& b) {
  Mat c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < b.cols; ++j) {
      double s = 0.0;
      for (int t = 0; t < a.cols; ++t) s += a.at(i, t) * b.at(t, j);
      c.at(i, j) = s;
    }
  return c;
}

double max_abs_diff(const Mat& a, const Mat& b) {
  REQUIRE(a.rows == b.rows);
  REQUIRE(a.cols == b.cols);
  double m = 0.0;
  for (size_t i = 0; i < a.a.size(); ++i)
    m = std::max(m, std::abs(a.a[i] - b.a[i]));
  return m;
}

TEST_CASE("matmul matches naive triple loop") {
  Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    Mat a = random_mat(7 + trial, 5, &rng);
    Mat b = random_mat(5, 4 + trial, &rng);
    CHECK(max_abs_diff(matmul(a, b), naive_matmul(a, b)) < 1e-12);
  }
}

TEST_CASE("matmul_at_b equals transpose then multiply") {
  Rng rng(12);
  Mat a = random_mat(20, 6, &rng);
  Mat b = random_mat(20, 3, &rng);
  Mat direct = matmul_at_b(a, b);
  Mat viaT = matmul(transpose(a), b);
  CHECK(direct.rows == 6);
  CHECK(direct.cols == 3);
  CHECK(max_abs_diff(direct, viaT) < 1e-12);
}

TEST_CASE("transpose is an involution") {
  Rng rng(13);
  Mat a = random_mat(9, 4, &rng);
  Mat tt = transpose(transpose(a));
  CHECK(max_abs_diff(a, tt) == 0.0);
}

TEST_CASE("frob_norm matches explicit sum of squares") {
  Rng rng(14);
  Mat a = random_mat(8, 8, &rng);
  double s = 0.0;
  for (double v : a.a) s += v * v;
  CHECK(frob_norm(a) == doctest::Approx(std::sqrt(s)).epsilon(1e-14));
}

TEST_CASE("qr_least_squares agrees with normal equations") {
  // Independent oracle: solve (A^T A) X = A^T B by Cholesky.  The QR route
  // never forms the Gram matrix, so agreement cross-checks both paths.
  Rng rng(15);
  int n = 60, d = 8, k = 3;
  Mat a = random_mat(n, d, &rng);
  Mat b = random_mat(n, k, &rng);

  Mat x_qr = qr_least_squares(a, b);
  REQUIRE(x_qr.rows == d);
  REQUIRE(x_qr.cols == k);

  Mat gram = matmul_at_b(a, a);
  Mat rhs = matmul_at_b(a, b);
  Mat l(d, d);
  REQUIRE(cholesky(gram, &l));
  Mat x_ne = cholesky_solve(l, rhs);
  CHECK(max_abs_diff(x_qr, x_ne) < 1e-9);
}

TEST_CASE("qr_least_squares residual is orthogonal to the column space") {
  Rng rng(16);
  int n = 50, d = 6;
  Mat a = random_mat(n, d, &rng);
  Mat b = random_mat(n, 2, &rng);
  Mat x = qr_least_squares(a, b);
  Mat ax = matmul(a, x);
  Mat r(n, 2);
  for (size_t i = 0; i < r.a.size(); ++i) r.a[i] = ax.a[i] - b.a[i];
  Mat atr = matmul_at_b(a, r);
  CHECK(frob_norm(atr) < 1e-10 * frob_norm(b));
}

TEST_CASE("qr_least_squares recovers planted coefficients exactly") {
  Rng rng(17);
  int n = 40, d = 5;
  Mat a = random_mat(n, d, &rng);
  Mat x_true = random_mat(d, 2, &rng);
  Mat b = matmul(a, x_true);
  Mat x = qr_least_squares(a, b);
  CHECK(max_abs_diff(x, x_true) < 1e-10);
}

TEST_CASE("qr_least_squares rejects rank deficient input") {
  Rng rng(18);
  int n = 30, d = 4;
  Mat a = random_mat(n, d, &rng);
  for (int i = 0; i < n; ++i) a.at(i, 3) = 2.0 * a.at(i, 1);
  Mat b = random_mat(n, 1, &rng);
  try {
    qr_least_squares(a, b);
    FAIL("expected rank deficiency error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kExecution);
  }
}

TEST_CASE("qr_least_squares requires n >= d") {
  Rng rng(19);
  Mat a = random_mat(3, 5, &rng);
  Mat b = random_mat(3, 1, &rng);
  try {
    qr_least_squares(a, b);
    FAIL("expected shape error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidArgument);
  }
}

TEST_CASE("jacobi_eigen_sym recovers a planted spectrum") {
  // Build S = Q diag(lambda) Q^T from a random orthonormal Q (via QR of a
  // random matrix simulated by Gram-Schmidt here, independent of the library).
  Rng rng(20);
  int d = 8;
  std::vector<double> lambda = {9.0, 7.5, 5.0, 3.25, 1.0, 0.5, 0.125, 0.01};
  Mat q = random_mat(d, d, &rng);
  for (int j = 0; j < d; ++j) {
    for (int p = 0; p < j; ++p) {
      double dot = 0.0;
      for (int i = 0; i < d; ++i) dot += q.at(i, j) * q.at(i, p);
      for (int i = 0; i < d; ++i) q.at(i, j) -= dot * q.at(i, p);
    }
    double nrm = 0.0;
    for (int i = 0; i < d; ++i) nrm += q.at(i, j) * q.at(i, j);
    nrm = std::sqrt(nrm);
    REQUIRE(nrm > 1e-8);
    for (int i = 0; i < d; ++i) q.at(i, j) /= nrm;
  }
  Mat s(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double v = 0.0;
      for (int t = 0; t < d; ++t) v += q.at(i, t) * lambda[t] * q.at(j, t);
      s.at(i, j) = v;
    }

  SymEig eig = jacobi_eigen_sym(s);
  REQUIRE(static_cast<int>(eig.values.size()) == d);
  for (int t = 0; t < d; ++t)
    CHECK(eig.values[t] == doctest::Approx(lambda[t]).epsilon(1e-9));
  for (int t = 1; t < d; ++t) CHECK(eig.values[t] <= eig.values[t - 1]);

  // Reconstruction V diag(values) V^T must give S back.
  Mat recon(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double v = 0.0;
      for (int t = 0; t < d; ++t)
        v += eig.vectors.at(i, t) * eig.values[t] * eig.vectors.at(j, t);
      recon.at(i, j) = v;
    }
  CHECK(max_abs_diff(recon, s) < 1e-9);

  // Columns of V are orthonormal.
  Mat vtv = matmul_at_b(eig.vectors, eig.vectors);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      CHECK(vtv.at(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
}

TEST_CASE("cholesky factor reproduces the input") {
  Rng rng(21);
  int d = 6;
  Mat a = random_mat(30, d, &rng);
  Mat s = matmul_at_b(a, a);
  Mat l(d, d);
  REQUIRE(cholesky(s, &l));
  Mat llt = matmul(l, transpose(l));
  CHECK(max_abs_diff(llt, s) < 1e-10);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) CHECK(l.at(i, j) == 0.0);
}

TEST_CASE("cholesky reports failure on an indefinite matrix") {
  Mat s(2, 2);
  s.at(0, 0) = 1.0;
  s.at(0, 1) = s.at(1, 0) = 4.0;
  s.at(1, 1) = 1.0;
  Mat l(2, 2);
  CHECK_FALSE(cholesky(s, &l));
}

TEST_CASE("cholesky_solve solves against a known solution") {
  Rng rng(22);
  int d = 7;
  Mat a = random_mat(40, d, &rng);
  Mat s = matmul_at_b(a, a);
  Mat x_true = random_mat(d, 3, &rng);
  Mat rhs = matmul(s, x_true);
  Mat l(d, d);
  REQUIRE(cholesky(s, &l));
  Mat x = cholesky_solve(l, rhs);
  CHECK(max_abs_diff(x, x_true) < 1e-8);
}

}  // namespace
}  // namespace pipeplan
