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

#ifndef PIPEPLAN_PCA_HPP_
#define PIPEPLAN_PCA_HPP_

#include <cstdint>
#include <vector>

#include "matrix.hpp"

namespace pipeplan {

struct PcaResult {
  std::vector<double> mean;        // column means of the input
  Mat components;                  // d x k, orthonormal columns
  std::vector<double> variances;   // top-k variances, descending
};

/// Exact principal components: eigenvectors of the column-centered
/// covariance, largest k.  Column signs are canonicalized (largest-
/// magnitude entry positive) so equal inputs give identical output.
PcaResult pca_svd(const Mat& A, std::size_t k);

/// Randomized approximation: Gaussian sketch of width k + oversample,
/// power_iters passes of subspace iteration, then an exact small
/// factorization.  Deterministic for a fixed seed.
PcaResult pca_tsvd(const Mat& A, std::size_t k, std::size_t oversample = 10,
                   int power_iters = 2, std::uint64_t seed = 0);

/// Largest principal angle (radians) between the column spans of two
/// orthonormal d x k bases.
double principal_angle(const Mat& P, const Mat& Q);

}  // namespace pipeplan

#endif  // PIPEPLAN_PCA_HPP_
