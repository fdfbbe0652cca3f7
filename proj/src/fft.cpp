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

#include "fft.hpp"

#include <cmath>

#include "common.hpp"

namespace pipeplan {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_inplace(std::vector<Cplx>& x, bool inverse, std::uint64_t* op_count) {
  const std::size_t n = x.size();
  check(n != 0 && (n & (n - 1)) == 0, ErrorCode::kInvalidArgument,
        "fft length must be a power of two");
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
    const Cplx wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      Cplx w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const Cplx u = x[i + j];
        const Cplx v = x[i + j + len / 2] * w;
        x[i + j] = u + v;
        x[i + j + len / 2] = u - v;
        w *= wl;
        if (op_count) ++*op_count;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& v : x) v *= inv;
  }
}

void fft2_inplace(std::vector<Cplx>& grid, std::size_t p, bool inverse,
                  std::uint64_t* op_count) {
  check(grid.size() == p * p, ErrorCode::kInvalidArgument, "fft2 size");
  std::vector<Cplx> tmp(p);
  for (std::size_t r = 0; r < p; ++r) {
    tmp.assign(grid.begin() + r * p, grid.begin() + (r + 1) * p);
    fft_inplace(tmp, inverse, op_count);
    std::copy(tmp.begin(), tmp.end(), grid.begin() + r * p);
  }
  for (std::size_t c = 0; c < p; ++c) {
    for (std::size_t r = 0; r < p; ++r) tmp[r] = grid[r * p + c];
    fft_inplace(tmp, inverse, op_count);
    for (std::size_t r = 0; r < p; ++r) grid[r * p + c] = tmp[r];
  }
}

}  // namespace pipeplan
