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

#ifndef PIPEPLAN_FFT_HPP_
#define PIPEPLAN_FFT_HPP_

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace pipeplan {

using Cplx = std::complex<double>;

std::size_t next_pow2(std::size_t n);

// In-place radix-2 FFT; x.size() must be a power of two.  inverse applies
// the conjugate transform and divides by the length.  op_count, when given,
// accumulates one unit per butterfly (used to verify the transform's work is
// independent of filter width).
void fft_inplace(std::vector<Cplx>& x, bool inverse,
                 std::uint64_t* op_count = nullptr);

// 2-D transform of a p x p grid stored row-major.
void fft2_inplace(std::vector<Cplx>& grid, std::size_t p, bool inverse,
                  std::uint64_t* op_count = nullptr);

}  // namespace pipeplan

#endif  // PIPEPLAN_FFT_HPP_
