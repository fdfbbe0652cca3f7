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

#ifndef PIPEPLAN_CONVOLUTION_HPP_
#define PIPEPLAN_CONVOLUTION_HPP_

#include <cstdint>
#include <vector>

namespace pipeplan {

// A bank of b square filters of side k.  Each filter is applied to every
// channel of the image and the per-channel responses are summed, so one
// filter yields one output channel.  Correlation orientation: the filter
// is slid without flipping.
struct FilterBank {
  std::size_t count = 0;  // b
  std::size_t side = 0;   // k
  bool separable = false;
  std::vector<double> w;  // count*side*side, filter-major
  std::vector<double> u;  // count*side column factors (separable only)
  std::vector<double> v;  // count*side row factors (separable only)

  const double* filter(std::size_t f) const { return w.data() + f * side * side; }

  static FilterBank random(std::size_t count, std::size_t side, std::uint64_t seed);
  static FilterBank random_separable(std::size_t count, std::size_t side,
                                     std::uint64_t seed);
  // Largest |w - u v^t| entry over all filters; 0 for non-separable banks.
  double factor_residual() const;
};

// All three routes take one image of side n with chan channels laid out
// as v[(y*n + x)*chan + c] and write an (n-k+1) x (n-k+1) x count output
// in the same layout.  They compute the same values by different
// schedules and must agree to rounding error.
void convolve_matmul(const double* img, std::size_t n, std::size_t chan,
                     const FilterBank& bank, double* out);
void convolve_separable(const double* img, std::size_t n, std::size_t chan,
                        const FilterBank& bank, double* out);
// op_count, when given, accumulates transform butterflies plus pointwise
// products so tests can verify the schedule is filter-size independent.
void convolve_fft(const double* img, std::size_t n, std::size_t chan,
                  const FilterBank& bank, double* out,
                  std::uint64_t* op_count = nullptr);

}  // namespace pipeplan

#endif  // PIPEPLAN_CONVOLUTION_HPP_
