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

#include "matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "common.hpp"

namespace pipeplan {

Mat matmul(const Mat& A, const Mat& B) {
  check(A.cols == B.rows, ErrorCode::kInvalidArgument, "matmul shape mismatch");
  Mat C(A.rows, B.cols);
  for (std::size_t i = 0; i < A.rows; ++i) {
    double* ci = C.row(i);
    const double* ai = A.row(i);
    for (std::size_t k = 0; k < A.cols; ++k) {
      const double aik = ai[k];
      if (aik == 0.0) continue;
      const double* bk = B.row(k);
      for (std::size_t j = 0; j < B.cols; ++j) ci[j] += aik * bk[j];
    }
  }
  return C;
}

Mat matmul_at_b(const Mat& A, const Mat& B) {
  check(A.rows == B.rows, ErrorCode::kInvalidArgument,
        "matmul_at_b shape mismatch");
  Mat C(A.cols, B.cols);
  for (std::size_t r = 0; r < A.rows; ++r) {
    const double* ar = A.row(r);
    const double* br = B.row(r);
    for (std::size_t i = 0; i < A.cols; ++i) {
      const double v = ar[i];
      if (v == 0.0) continue;
      double* ci = C.row(i);
      for (std::size_t j = 0; j < B.cols; ++j) ci[j] += v * br[j];
    }
  }
  return C;
}

Mat transpose(const Mat& A) {
  Mat T(A.cols, A.rows);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < A.cols; ++j) T.at(j, i) = A.at(i, j);
  return T;
}

double frob_norm(const Mat& A) {
  double s = 0.0;
  for (double v : A.a) s += v * v;
  return std::sqrt(s);
}

Mat qr_least_squares(const Mat& A, const Mat& B, double singular_tol) {
  const std::size_t n = A.rows, d = A.cols, k = B.cols;
  check(B.rows == n, ErrorCode::kInvalidArgument, "qr rhs row mismatch");
  check(n >= d, ErrorCode::kInvalidArgument, "qr needs n >= d");
  Mat R = A;   // becomes R in the upper triangle
  Mat Y = B;   // becomes Q^T B
  std::vector<double> v(n);
  for (std::size_t j = 0; j < d; ++j) {
    // Householder reflector for column j below the diagonal.
    double norm = 0.0;
    for (std::size_t i = j; i < n; ++i) {
      v[i] = R.at(i, j);
      norm += v[i] * v[i];
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    const double alpha = (v[j] >= 0.0) ? -norm : norm;
    v[j] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = j; i < n; ++i) vnorm2 += v[i] * v[i];
    if (vnorm2 == 0.0) continue;
    const double beta = 2.0 / vnorm2;
    for (std::size_t c = j; c < d; ++c) {
      double dot = 0.0;
      for (std::size_t i = j; i < n; ++i) dot += v[i] * R.at(i, c);
      dot *= beta;
      for (std::size_t i = j; i < n; ++i) R.at(i, c) -= dot * v[i];
    }
    for (std::size_t c = 0; c < k; ++c) {
      double dot = 0.0;
      for (std::size_t i = j; i < n; ++i) dot += v[i] * Y.at(i, c);
      dot *= beta;
      for (std::size_t i = j; i < n; ++i) Y.at(i, c) -= dot * v[i];
    }
  }
  double max_diag = 0.0;
  for (std::size_t j = 0; j < d; ++j)
    max_diag = std::max(max_diag, std::fabs(R.at(j, j)));
  check(max_diag > 0.0, ErrorCode::kExecution, "singular system in QR solve");
  for (std::size_t j = 0; j < d; ++j) {
    if (std::fabs(R.at(j, j)) < singular_tol * max_diag)
      fail(ErrorCode::kExecution, "singular system in QR solve");
  }
  // Back-substitution on the top d x d triangle.
  Mat X(d, k);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t jj = d; jj-- > 0;) {
      double s = Y.at(jj, c);
      for (std::size_t m = jj + 1; m < d; ++m) s -= R.at(jj, m) * X.at(m, c);
      X.at(jj, c) = s / R.at(jj, jj);
    }
  }
  return X;
}

SymEig jacobi_eigen_sym(const Mat& S, int max_sweeps) {
  const std::size_t d = S.rows;
  check(S.cols == d, ErrorCode::kInvalidArgument, "jacobi needs square input");
  Mat A = S;
  Mat V(d, d);
  for (std::size_t i = 0; i < d; ++i) V.at(i, i) = 1.0;
  double total = 0.0;
  for (double x : A.a) total += x * x;
  const double stop = 1e-22 * std::max(total, 1e-300);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) off += A.at(p, q) * A.at(p, q);
    if (off * 2.0 < stop) break;
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = A.at(p, q);
        if (apq == 0.0) continue;
        const double app = A.at(p, p), aqq = A.at(q, q);
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0)
                             ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                             : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t i = 0; i < d; ++i) {
          const double aip = A.at(i, p), aiq = A.at(i, q);
          A.at(i, p) = c * aip - s * aiq;
          A.at(i, q) = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < d; ++i) {
          const double api = A.at(p, i), aqi = A.at(q, i);
          A.at(p, i) = c * api - s * aqi;
          A.at(q, i) = s * api + c * aqi;
        }
        for (std::size_t i = 0; i < d; ++i) {
          const double vip = V.at(i, p), viq = V.at(i, q);
          V.at(i, p) = c * vip - s * viq;
          V.at(i, q) = s * vip + c * viq;
        }
      }
    }
  }
  SymEig out;
  out.values.resize(d);
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> diag(d);
  for (std::size_t i = 0; i < d; ++i) diag[i] = A.at(i, i);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return diag[x] > diag[y]; });
  out.vectors = Mat(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    out.values[j] = diag[order[j]];
    for (std::size_t i = 0; i < d; ++i)
      out.vectors.at(i, j) = V.at(i, order[j]);
  }
  return out;
}

bool cholesky(const Mat& S, Mat* L) {
  const std::size_t d = S.rows;
  if (S.cols != d) return false;
  *L = Mat(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = S.at(i, j);
      for (std::size_t m = 0; m < j; ++m) s -= L->at(i, m) * L->at(j, m);
      if (i == j) {
        if (s <= 0.0) return false;
        L->at(i, i) = std::sqrt(s);
      } else {
        L->at(i, j) = s / L->at(j, j);
      }
    }
  }
  return true;
}

Mat cholesky_solve(const Mat& L, const Mat& B) {
  const std::size_t d = L.rows, k = B.cols;
  Mat Y(d, k), X(d, k);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < d; ++i) {
      double s = B.at(i, c);
      for (std::size_t m = 0; m < i; ++m) s -= L.at(i, m) * Y.at(m, c);
      Y.at(i, c) = s / L.at(i, i);
    }
    for (std::size_t i = d; i-- > 0;) {
      double s = Y.at(i, c);
      for (std::size_t m = i + 1; m < d; ++m) s -= L.at(m, i) * X.at(m, c);
      X.at(i, c) = s / L.at(i, i);
    }
  }
  return X;
}

}  // namespace pipeplan
