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

#include "matrix.hpp"
#include "pca.hpp"
#include "rng.hpp"

namespace pipeplan {
namespace {

Mat random_mat(int rows, int cols, Rng* rng) {
  Mat m(rows, cols);
  for (double& v : m.a) v = rng->normal();
  return m;
}

// Data with a planted decaying spectrum: X = G * diag(sigma) after
// centering noise, sigma_j = 2^-j.
Mat spectrum_data(int n, int d, Rng* rng) {
  Mat x = random_mat(n, d, rng);
  for (int j = 0; j < d; ++j) {
    double s = std::pow(2.0, -static_cast<double>(j));
    for (int i = 0; i < n; ++i) x.at(i, j) *= s;
  }
  return x;
}

// Covariance eigen-decomposition computed from scratch: center, form
// S = X^T X / (n - 1), run the symmetric eigensolver.  Used as the oracle
// for variances below; it shares only the matrix container with pca_svd.
std::vector<double> covariance_variances(const Mat& a, std::size_t k) {
  Mat c = a;
  for (int j = 0; j < c.cols; ++j) {
    double mu = 0.0;
    for (int i = 0; i < c.rows; ++i) mu += c.at(i, j);
    mu /= c.rows;
    for (int i = 0; i < c.rows; ++i) c.at(i, j) -= mu;
  }
  Mat s = matmul_at_b(c, c);
  for (double& v : s.a) v /= (c.rows - 1);
  SymEig eig = jacobi_eigen_sym(s);
  eig.values.resize(k);
  return eig.values;
}

double column_orthonormality_error(const Mat& p) {
  Mat g = matmul_at_b(p, p);
  double worst = 0.0;
  for (int i = 0; i < g.rows; ++i)
    for (int j = 0; j < g.cols; ++j)
      worst = std::max(worst, std::abs(g.at(i, j) - (i == j ? 1.0 : 0.0)));
  return worst;
}

TEST_CASE("pca_svd components are orthonormal with descending variances") {
  Rng rng(41);
  Mat x = spectrum_data(200, 20, &rng);
  PcaResult r = pca_svd(x, 6);
  REQUIRE(r.components.rows == 20);
  REQUIRE(r.components.cols == 6);
  REQUIRE(r.variances.size() == 6);
  CHECK(column_orthonormality_error(r.components) < 1e-10);
  for (std::size_t j = 1; j < r.variances.size(); ++j)
    CHECK(r.variances[j] <= r.variances[j - 1]);
}

TEST_CASE("pca_svd variances match a from-scratch covariance eigensolve") {
  Rng rng(42);
  Mat x = spectrum_data(300, 15, &rng);
  PcaResult r = pca_svd(x, 5);
  std::vector<double> oracle = covariance_variances(x, 5);
  for (std::size_t j = 0; j < 5; ++j)
    CHECK(r.variances[j] == doctest::Approx(oracle[j]).epsilon(1e-8));
}

TEST_CASE("pca_svd mean is the column mean") {
  Rng rng(43);
  Mat x = random_mat(50, 7, &rng);
  PcaResult r = pca_svd(x, 2);
  REQUIRE(r.mean.size() == 7);
  for (int j = 0; j < 7; ++j) {
    double mu = 0.0;
    for (int i = 0; i < 50; ++i) mu += x.at(i, j);
    mu /= 50.0;
    CHECK(r.mean[j] == doctest::Approx(mu).epsilon(1e-12));
  }
}

TEST_CASE("pca_svd recovers a planted low rank subspace") {
  // X = U V^T + tiny noise; the top-k span must align with span(U).
  Rng rng(44);
  int n = 150, d = 12, k = 3;
  Mat u = random_mat(n, k, &rng);
  Mat v = random_mat(d, k, &rng);
  Mat x(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int t = 0; t < k; ++t) s += u.at(i, t) * v.at(j, t);
      x.at(i, j) = s + 1e-9 * rng.normal();
    }

  PcaResult r = pca_svd(x, k);

  // Orthonormalize V by Gram-Schmidt for the angle comparison.
  Mat q = v;
  for (int j = 0; j < k; ++j) {
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
  CHECK(principal_angle(r.components, q) < 1e-4);
}

TEST_CASE("pca_tsvd tracks pca_svd on a decaying spectrum") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(100 + seed);
    Mat x = spectrum_data(250, 40, &rng);
    PcaResult exact = pca_svd(x, 8);
    PcaResult approx = pca_tsvd(x, 8, 10, 2, seed);
    CHECK(column_orthonormality_error(approx.components) < 1e-9);
    CHECK(principal_angle(exact.components, approx.components) < 1e-6);
    for (std::size_t j = 0; j < 8; ++j)
      CHECK(approx.variances[j] ==
            doctest::Approx(exact.variances[j]).epsilon(1e-5));
  }
}

TEST_CASE("pca_tsvd is deterministic per seed and varies across seeds") {
  Rng rng(45);
  Mat x = spectrum_data(120, 30, &rng);
  PcaResult a = pca_tsvd(x, 4, 10, 2, 7);
  PcaResult b = pca_tsvd(x, 4, 10, 2, 7);
  CHECK(a.components.a == b.components.a);
  CHECK(a.variances == b.variances);

  // A different sketch gives a (slightly) different basis representation;
  // the spanned subspace still matches.
  PcaResult c = pca_tsvd(x, 4, 10, 2, 8);
  CHECK(principal_angle(a.components, c.components) < 1e-5);
}

TEST_CASE("principal_angle separates aligned and orthogonal spans") {
  int d = 6;
  Mat p(d, 2), q(d, 2), r(d, 2);
  p.at(0, 0) = 1.0;
  p.at(1, 1) = 1.0;
  q.at(0, 0) = 1.0;
  q.at(1, 1) = 1.0;
  r.at(2, 0) = 1.0;
  r.at(3, 1) = 1.0;
  CHECK(principal_angle(p, q) < 1e-12);
  CHECK(principal_angle(p, r) ==
        doctest::Approx(std::acos(0.0)).epsilon(1e-10));

  // Rotation within the span leaves the angle at zero.
  Mat q2(d, 2);
  double c45 = std::sqrt(0.5);
  q2.at(0, 0) = c45;
  q2.at(1, 0) = c45;
  q2.at(0, 1) = -c45;
  q2.at(1, 1) = c45;
  CHECK(principal_angle(p, q2) < 1e-10);
}

}  // namespace
}  // namespace pipeplan
