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

#include "pca.hpp"

#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "rng.hpp"

namespace pipeplan {
namespace {

std::vector<double> column_means(const Mat& A) {
  std::vector<double> mu(A.cols, 0.0);
  for (std::size_t i = 0; i < A.rows; ++i) {
    const double* r = A.row(i);
    for (std::size_t j = 0; j < A.cols; ++j) mu[j] += r[j];
  }
  const double inv = A.rows > 0 ? 1.0 / static_cast<double>(A.rows) : 0.0;
  for (double& m : mu) m *= inv;
  return mu;
}

Mat centered(const Mat& A, const std::vector<double>& mu) {
  Mat C(A.rows, A.cols);
  for (std::size_t i = 0; i < A.rows; ++i) {
    const double* r = A.row(i);
    double* o = C.row(i);
    for (std::size_t j = 0; j < A.cols; ++j) o[j] = r[j] - mu[j];
  }
  return C;
}

// Modified Gram-Schmidt with one re-orthogonalization pass.  Columns
// that vanish are replaced by zero so downstream spans stay valid.
void orthonormalize_columns(Mat* Y) {
  const std::size_t n = Y->rows, l = Y->cols;
  for (std::size_t c = 0; c < l; ++c) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t p = 0; p < c; ++p) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += Y->at(i, p) * Y->at(i, c);
        for (std::size_t i = 0; i < n; ++i) Y->at(i, c) -= dot * Y->at(i, p);
      }
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) nrm += Y->at(i, c) * Y->at(i, c);
    nrm = std::sqrt(nrm);
    if (nrm > 1e-300) {
      for (std::size_t i = 0; i < n; ++i) Y->at(i, c) /= nrm;
    } else {
      for (std::size_t i = 0; i < n; ++i) Y->at(i, c) = 0.0;
    }
  }
}

void canonicalize_sign(Mat* P) {
  for (std::size_t c = 0; c < P->cols; ++c) {
    double best = 0.0;
    for (std::size_t i = 0; i < P->rows; ++i) {
      if (std::fabs(P->at(i, c)) > std::fabs(best)) best = P->at(i, c);
    }
    if (best < 0.0) {
      for (std::size_t i = 0; i < P->rows; ++i) P->at(i, c) = -P->at(i, c);
    }
  }
}

}  // namespace

PcaResult pca_svd(const Mat& A, std::size_t k) {
  check(A.rows >= 2, ErrorCode::kInvalidArgument, "pca needs at least 2 rows");
  check(k >= 1 && k <= A.cols, ErrorCode::kInvalidArgument,
        "pca component count out of range");
  PcaResult res;
  res.mean = column_means(A);
  Mat C = centered(A, res.mean);
  Mat G = matmul_at_b(C, C);  // d x d scatter
  SymEig eig = jacobi_eigen_sym(G);
  res.components = Mat(A.cols, k);
  res.variances.resize(k);
  const double inv = 1.0 / static_cast<double>(A.rows - 1);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < A.cols; ++i) {
      res.components.at(i, c) = eig.vectors.at(i, c);
    }
    res.variances[c] = std::max(0.0, eig.values[c]) * inv;
  }
  canonicalize_sign(&res.components);
  return res;
}

PcaResult pca_tsvd(const Mat& A, std::size_t k, std::size_t oversample,
                   int power_iters, std::uint64_t seed) {
  check(A.rows >= 2, ErrorCode::kInvalidArgument, "pca needs at least 2 rows");
  check(k >= 1 && k <= A.cols, ErrorCode::kInvalidArgument,
        "pca component count out of range");
  const std::size_t d = A.cols;
  const std::size_t l = std::min(d, k + oversample);

  PcaResult res;
  res.mean = column_means(A);
  Mat C = centered(A, res.mean);

  Rng rng(derive_seed(seed, 0x7ca0u));
  Mat omega(d, l);
  for (double& x : omega.a) x = rng.normal();

  Mat Y = matmul(C, omega);  // n x l sketch of the column space
  orthonormalize_columns(&Y);
  for (int q = 0; q < power_iters; ++q) {
    Mat Z = matmul_at_b(C, Y);  // d x l
    orthonormalize_columns(&Z);
    Y = matmul(C, Z);
    orthonormalize_columns(&Y);
  }

  Mat B = matmul_at_b(Y, C);      // l x d projected data
  Mat S = Mat(l, l);              // B * B^t, small symmetric
  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t j = i; j < l; ++j) {
      double dot = 0.0;
      for (std::size_t t = 0; t < d; ++t) dot += B.at(i, t) * B.at(j, t);
      S.at(i, j) = dot;
      S.at(j, i) = dot;
    }
  }
  SymEig eig = jacobi_eigen_sym(S);

  // Right singular vectors of B: v_c = B^t u_c / sigma_c.
  res.components = Mat(d, k);
  res.variances.resize(k);
  const double inv = 1.0 / static_cast<double>(A.rows - 1);
  for (std::size_t c = 0; c < k; ++c) {
    const double sigma2 = std::max(0.0, eig.values[c]);
    const double sigma = std::sqrt(sigma2);
    res.variances[c] = sigma2 * inv;
    if (sigma > 1e-300) {
      for (std::size_t i = 0; i < d; ++i) {
        double dot = 0.0;
        for (std::size_t t = 0; t < l; ++t) dot += B.at(t, i) * eig.vectors.at(t, c);
        res.components.at(i, c) = dot / sigma;
      }
    } else {
      for (std::size_t i = 0; i < d; ++i) res.components.at(i, c) = 0.0;
    }
  }
  canonicalize_sign(&res.components);
  return res;
}

double principal_angle(const Mat& P, const Mat& Q) {
  check(P.rows == Q.rows && P.cols == Q.cols, ErrorCode::kInvalidArgument,
        "principal_angle shape mismatch");
  Mat M = matmul_at_b(P, Q);  // k x k; its singular values are cos(theta_i)
  Mat S = matmul_at_b(M, M);
  SymEig eig = jacobi_eigen_sym(S);
  const double cos2 =
      std::clamp(eig.values.empty() ? 1.0 : eig.values.back(), 0.0, 1.0);
  if (cos2 < 0.5) {
    // Wide angle: acos of the smallest singular value is well conditioned.
    return std::acos(std::sqrt(cos2));
  }
  // Near-aligned spans: acos loses half the digits, so switch to the sine
  // route.  The singular values of (I - P P^t) Q are exactly sin(theta_i),
  // and the largest eigenvalue is where Jacobi is accurate.
  Mat R = matmul(P, M);
  for (std::size_t i = 0; i < R.a.size(); ++i) R.a[i] = Q.a[i] - R.a[i];
  Mat T = matmul_at_b(R, R);
  SymEig sin_eig = jacobi_eigen_sym(T);
  const double sin2 =
      std::clamp(sin_eig.values.empty() ? 0.0 : sin_eig.values.front(), 0.0,
                 1.0);
  return std::asin(std::sqrt(sin2));
}

}  // namespace pipeplan
