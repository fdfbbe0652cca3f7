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

#include "solvers.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "common.hpp"

namespace pipeplan {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const std::vector<double>& x, std::vector<double>* y) {
  for (std::size_t i = 0; i < x.size(); ++i) (*y)[i] += alpha * x[i];
}

// Access to features through two passes only; keeps one L-BFGS engine for
// the dense and sparse routes.
struct DenseOps {
  const Mat& A;
  std::uint64_t pass_madds() const {
    return static_cast<std::uint64_t>(A.rows) * A.cols;
  }
  void forward(const Mat& X, Mat* P) const {
    *P = matmul(A, X);
  }
  void backward(const Mat& R, Mat* G) const {
    *G = matmul_at_b(A, R);
  }
};

struct SparseOps {
  const SparseData& A;
  std::uint64_t nnz;
  std::uint64_t pass_madds() const { return nnz; }
  void forward(const Mat& X, Mat* P) const {
    const std::size_t k = X.cols;
    *P = Mat(A.n, k);
    for (std::size_t i = 0; i < A.n; ++i) {
      double* pi = P->row(i);
      for (const auto& [idx, val] : A.rows[i]) {
        const double* xr = X.row(idx);
        for (std::size_t c = 0; c < k; ++c) pi[c] += val * xr[c];
      }
    }
  }
  void backward(const Mat& R, Mat* G) const {
    const std::size_t k = R.cols;
    *G = Mat(A.d, k);
    for (std::size_t i = 0; i < A.n; ++i) {
      const double* ri = R.row(i);
      for (const auto& [idx, val] : A.rows[i]) {
        double* gr = G->row(idx);
        for (std::size_t c = 0; c < k; ++c) gr[c] += val * ri[c];
      }
    }
  }
};

template <typename Ops>
double objective_from(const Ops& ops, const Mat& X, const Mat& B, Mat* R) {
  Mat P;
  ops.forward(X, &P);
  *R = P;
  double f = 0;
  for (std::size_t i = 0; i < R->a.size(); ++i) {
    R->a[i] -= B.a[i];
    f += R->a[i] * R->a[i];
  }
  return 0.5 * f;
}

template <typename Ops>
Mat lbfgs_engine(const Ops& ops, std::size_t d, const Mat& B,
                 const LbfgsOptions& opt, SolverCounters* counters) {
  const std::size_t k = B.cols;
  const std::uint64_t pass = ops.pass_madds() * k;
  const std::size_t dk = d * k;
  SolverCounters local;
  SolverCounters* cnt = counters ? counters : &local;

  Mat X(d, k), R, G;
  double f = objective_from(ops, X, B, &R);
  ops.backward(R, &G);
  cnt->gradient_madds += 2 * pass;
  const double g0 = std::sqrt(dot(G.a, G.a));

  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;

  for (int it = 0; it < opt.iters; ++it) {
    const double gnorm = std::sqrt(dot(G.a, G.a));
    if (gnorm <= opt.grad_rtol * (1.0 + g0)) break;
    ++cnt->iterations;

    // Two-loop recursion for p = -H g.
    std::vector<double> p = G.a;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t h = s_hist.size(); h-- > 0;) {
      alpha[h] = rho_hist[h] * dot(s_hist[h], p);
      axpy(-alpha[h], y_hist[h], &p);
    }
    if (!y_hist.empty()) {
      const auto& y = y_hist.back();
      const auto& s = s_hist.back();
      const double gamma = dot(s, y) / dot(y, y);
      for (double& v : p) v *= gamma;
    }
    for (std::size_t h = 0; h < s_hist.size(); ++h) {
      const double beta = rho_hist[h] * dot(y_hist[h], p);
      axpy(alpha[h] - beta, s_hist[h], &p);
    }
    for (double& v : p) v = -v;
    cnt->update_madds += (4 * s_hist.size() + 2) * dk;

    double gTp = dot(G.a, p);
    if (gTp >= 0) {  // not a descent direction; fall back to steepest
      p = G.a;
      for (double& v : p) v = -v;
      gTp = dot(G.a, p);
    }

    // Armijo backtracking with step halving.
    double step = 1.0;
    Mat Xtrial(d, k), Rtrial;
    double ftrial = f;
    bool accepted = false;
    for (int bt = 0; bt < opt.max_backtrack; ++bt) {
      Xtrial.a = X.a;
      axpy(step, p, &Xtrial.a);
      ftrial = objective_from(ops, Xtrial, B, &Rtrial);
      cnt->objective_madds += pass;
      if (ftrial <= f + opt.armijo_c * step * gTp) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no progress possible at the smallest step

    Mat Gnew;
    ops.backward(Rtrial, &Gnew);
    // The accepted trial's forward pass belongs to this step's gradient.
    cnt->objective_madds -= pass;
    cnt->gradient_madds += 2 * pass;

    std::vector<double> s(dk), y(dk);
    for (std::size_t i = 0; i < dk; ++i) {
      s[i] = Xtrial.a[i] - X.a[i];
      y[i] = Gnew.a[i] - G.a[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-14 * std::sqrt(dot(s, s)) * std::sqrt(dot(y, y))) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > opt.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    X = std::move(Xtrial);
    G = std::move(Gnew);
    f = ftrial;
  }
  return X;
}

}  // namespace

Mat solve_exact_qr(const Mat& A, const Mat& B) {
  return qr_least_squares(A, B, 1e-12);
}

Mat solve_lbfgs(const Mat& A, const Mat& B, const LbfgsOptions& opt,
                SolverCounters* counters) {
  check(A.rows == B.rows, ErrorCode::kInvalidArgument,
        "solver shape mismatch");
  return lbfgs_engine(DenseOps{A}, A.cols, B, opt, counters);
}

Mat solve_lbfgs(const SparseData& A, const Mat& B, const LbfgsOptions& opt,
                SolverCounters* counters) {
  check(A.n == B.rows, ErrorCode::kInvalidArgument, "solver shape mismatch");
  return lbfgs_engine(SparseOps{A, A.nnz()}, A.d, B, opt, counters);
}

Mat solve_block(const Mat& A, const Mat& B, std::size_t block, int passes,
                SolverCounters* counters) {
  const std::size_t n = A.rows, d = A.cols, k = B.cols;
  check(B.rows == n, ErrorCode::kInvalidArgument, "solver shape mismatch");
  check(block >= 1 && passes >= 1, ErrorCode::kInvalidArgument,
        "block solver needs block >= 1 and passes >= 1");
  block = std::min(block, d);

  struct BlockFactor {
    std::size_t j0, j1;
    Mat L;
  };
  std::vector<BlockFactor> factors;
  for (std::size_t j0 = 0; j0 < d; j0 += block) {
    const std::size_t j1 = std::min(d, j0 + block);
    const std::size_t b = j1 - j0;
    Mat Ab(n, b);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < b; ++j) Ab.at(i, j) = A.at(i, j0 + j);
    Mat G = matmul_at_b(Ab, Ab);
    Mat L;
    if (!cholesky(G, &L)) {
      double tr = 0;
      for (std::size_t j = 0; j < b; ++j) tr += G.at(j, j);
      const double ridge = 1e-8 * tr;
      for (std::size_t j = 0; j < b; ++j) G.at(j, j) += ridge;
      check(cholesky(G, &L), ErrorCode::kExecution,
            "block Gram not positive definite even with ridge");
      if (counters) ++counters->ridge_blocks;
    }
    factors.push_back({j0, j1, std::move(L)});
  }

  Mat X(d, k);
  Mat R = B;  // residual B - A X, X starts at zero
  for (int pass = 0; pass < passes; ++pass) {
    if (counters) ++counters->iterations;
    for (const auto& f : factors) {
      const std::size_t b = f.j1 - f.j0;
      // rhs = A_blk^T R
      Mat rhs(b, k);
      for (std::size_t i = 0; i < n; ++i) {
        const double* ri = R.row(i);
        const double* ai = A.row(i) + f.j0;
        for (std::size_t j = 0; j < b; ++j) {
          const double v = ai[j];
          if (v == 0.0) continue;
          double* rj = rhs.row(j);
          for (std::size_t c = 0; c < k; ++c) rj[c] += v * ri[c];
        }
      }
      Mat delta = cholesky_solve(f.L, rhs);
      for (std::size_t j = 0; j < b; ++j)
        for (std::size_t c = 0; c < k; ++c)
          X.at(f.j0 + j, c) += delta.at(j, c);
      // R -= A_blk delta
      for (std::size_t i = 0; i < n; ++i) {
        double* ri = R.row(i);
        const double* ai = A.row(i) + f.j0;
        for (std::size_t j = 0; j < b; ++j) {
          const double v = ai[j];
          if (v == 0.0) continue;
          const double* dj = delta.row(j);
          for (std::size_t c = 0; c < k; ++c) ri[c] -= v * dj[c];
        }
      }
    }
  }
  return X;
}

double least_squares_objective(const Mat& A, const Mat& X, const Mat& B) {
  Mat R = matmul(A, X);
  double f = 0;
  for (std::size_t i = 0; i < R.a.size(); ++i) {
    const double r = R.a[i] - B.a[i];
    f += r * r;
  }
  return 0.5 * f;
}

double least_squares_objective(const SparseData& A, const Mat& X,
                               const Mat& B) {
  SparseOps ops{A, 0};
  Mat R;
  ops.forward(X, &R);
  double f = 0;
  for (std::size_t i = 0; i < R.a.size(); ++i) {
    const double r = R.a[i] - B.a[i];
    f += r * r;
  }
  return 0.5 * f;
}

Mat densify(const SparseData& A) {
  Mat M(A.n, A.d);
  for (std::size_t i = 0; i < A.n; ++i)
    for (const auto& [idx, val] : A.rows[i]) M.at(i, idx) = val;
  return M;
}

}  // namespace pipeplan
