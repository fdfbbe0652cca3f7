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

#ifndef PIPEPLAN_MATRIX_HPP_
#define PIPEPLAN_MATRIX_HPP_

#include <cstddef>
#include <vector>

namespace pipeplan {

// Dense row-major matrix.  Deliberately minimal: the library's numeric
// kernels are written against this one type.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
  double* row(std::size_t i) { return a.data() + i * cols; }
  const double* row(std::size_t i) const { return a.data() + i * cols; }
};

Mat matmul(const Mat& A, const Mat& B);
// C = A^T * B without forming A^T.
Mat matmul_at_b(const Mat& A, const Mat& B);
Mat transpose(const Mat& A);
double frob_norm(const Mat& A);

// Least-squares solve min ||A X - B||_F via Householder QR (A overwritten
// conceptually; inputs are copied).  A is n x d with n >= d, B is n x k.
// Fails with ErrorCode::kExecution when R has a relative diagonal entry
// below singular_tol (rank deficiency is an error, not a silent answer).
Mat qr_least_squares(const Mat& A, const Mat& B, double singular_tol = 1e-12);

// Symmetric eigendecomposition by cyclic Jacobi.  S must be symmetric.
// Returns eigenvalues in descending order; eigenvectors() column j matches
// eigenvalue j.
struct SymEig {
  std::vector<double> values;
  Mat vectors;  // d x d, columns are eigenvectors
};
SymEig jacobi_eigen_sym(const Mat& S, int max_sweeps = 40);

// Cholesky factor L (lower) of a symmetric positive definite S; returns
// false when a non-positive pivot is hit.
bool cholesky(const Mat& S, Mat* L);
// Solves L L^T x = b for many right-hand sides; B is d x k.
Mat cholesky_solve(const Mat& L, const Mat& B);

}  // namespace pipeplan

#endif  // PIPEPLAN_MATRIX_HPP_
