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

#include "convolution.hpp"

#include <cmath>

#include "common.hpp"
#include "fft.hpp"
#include "matrix.hpp"
#include "rng.hpp"

namespace pipeplan {

FilterBank FilterBank::random(std::size_t count, std::size_t side,
                              std::uint64_t seed) {
  check(count >= 1 && side >= 1, ErrorCode::kInvalidArgument,
        "filter bank needs count >= 1 and side >= 1");
  FilterBank bank;
  bank.count = count;
  bank.side = side;
  bank.w.resize(count * side * side);
  Rng rng(derive_seed(seed, 0xf117u));
  for (double& x : bank.w) x = rng.normal();
  return bank;
}

FilterBank FilterBank::random_separable(std::size_t count, std::size_t side,
                                        std::uint64_t seed) {
  check(count >= 1 && side >= 1, ErrorCode::kInvalidArgument,
        "filter bank needs count >= 1 and side >= 1");
  FilterBank bank;
  bank.count = count;
  bank.side = side;
  bank.separable = true;
  bank.u.resize(count * side);
  bank.v.resize(count * side);
  bank.w.resize(count * side * side);
  Rng rng(derive_seed(seed, 0xf117u));
  for (double& x : bank.u) x = rng.normal();
  for (double& x : bank.v) x = rng.normal();
  for (std::size_t f = 0; f < count; ++f) {
    const double* uf = bank.u.data() + f * side;
    const double* vf = bank.v.data() + f * side;
    double* wf = bank.w.data() + f * side * side;
    for (std::size_t i = 0; i < side; ++i) {
      for (std::size_t j = 0; j < side; ++j) wf[i * side + j] = uf[i] * vf[j];
    }
  }
  return bank;
}

double FilterBank::factor_residual() const {
  if (!separable) return 0.0;
  double worst = 0.0;
  for (std::size_t f = 0; f < count; ++f) {
    const double* uf = u.data() + f * side;
    const double* vf = v.data() + f * side;
    const double* wf = filter(f);
    for (std::size_t i = 0; i < side; ++i) {
      for (std::size_t j = 0; j < side; ++j) {
        worst = std::max(worst, std::fabs(wf[i * side + j] - uf[i] * vf[j]));
      }
    }
  }
  return worst;
}

namespace {

void check_dims(std::size_t n, std::size_t chan, const FilterBank& bank) {
  check(bank.side <= n, ErrorCode::kInvalidArgument,
        "filter larger than image");
  check(chan >= 1, ErrorCode::kInvalidArgument, "image needs >= 1 channel");
  check(!bank.w.empty(), ErrorCode::kInvalidArgument, "empty filter bank");
}

}  // namespace

void convolve_matmul(const double* img, std::size_t n, std::size_t chan,
                     const FilterBank& bank, double* out) {
  check_dims(n, chan, bank);
  const std::size_t k = bank.side;
  const std::size_t m = n - k + 1;
  const std::size_t patch = k * k * chan;

  // Patch matrix: one row per output position, one column per
  // (offset, channel) pair.
  Mat patches(m * m, patch);
  for (std::size_t y = 0; y < m; ++y) {
    for (std::size_t x = 0; x < m; ++x) {
      double* row = patches.row(y * m + x);
      std::size_t col = 0;
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          const double* px = img + ((y + i) * n + (x + j)) * chan;
          for (std::size_t c = 0; c < chan; ++c) row[col++] = px[c];
        }
      }
    }
  }
  // Filter matrix: each filter column repeats its tap across channels.
  Mat fmat(patch, bank.count);
  for (std::size_t f = 0; f < bank.count; ++f) {
    const double* wf = bank.filter(f);
    std::size_t row = 0;
    for (std::size_t t = 0; t < k * k; ++t) {
      for (std::size_t c = 0; c < chan; ++c) fmat.at(row++, f) = wf[t];
    }
  }
  Mat res = matmul(patches, fmat);
  for (std::size_t p = 0; p < m * m; ++p) {
    for (std::size_t f = 0; f < bank.count; ++f) {
      out[p * bank.count + f] = res.at(p, f);
    }
  }
}

void convolve_separable(const double* img, std::size_t n, std::size_t chan,
                        const FilterBank& bank, double* out) {
  check_dims(n, chan, bank);
  check(bank.separable, ErrorCode::kInvalidArgument,
        "separable route needs factored filters");
  const std::size_t k = bank.side;
  const std::size_t m = n - k + 1;
  for (std::size_t i = 0; i < m * m * bank.count; ++i) out[i] = 0.0;

  std::vector<double> rowpass(n * m);
  for (std::size_t c = 0; c < chan; ++c) {
    for (std::size_t f = 0; f < bank.count; ++f) {
      const double* uf = bank.u.data() + f * k;
      const double* vf = bank.v.data() + f * k;
      // Horizontal pass with the row factor.
      for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t x = 0; x < m; ++x) {
          double acc = 0.0;
          for (std::size_t j = 0; j < k; ++j) {
            acc += img[(y * n + (x + j)) * chan + c] * vf[j];
          }
          rowpass[y * m + x] = acc;
        }
      }
      // Vertical pass with the column factor.
      for (std::size_t y = 0; y < m; ++y) {
        for (std::size_t x = 0; x < m; ++x) {
          double acc = 0.0;
          for (std::size_t i = 0; i < k; ++i) acc += rowpass[(y + i) * m + x] * uf[i];
          out[(y * m + x) * bank.count + f] += acc;
        }
      }
    }
  }
}

void convolve_fft(const double* img, std::size_t n, std::size_t chan,
                  const FilterBank& bank, double* out,
                  std::uint64_t* op_count) {
  check_dims(n, chan, bank);
  const std::size_t k = bank.side;
  const std::size_t m = n - k + 1;
  const std::size_t p = next_pow2(n);
  for (std::size_t i = 0; i < m * m * bank.count; ++i) out[i] = 0.0;

  std::vector<Cplx> fimg(p * p), ffil(p * p), prod(p * p);
  for (std::size_t c = 0; c < chan; ++c) {
    for (std::size_t f = 0; f < bank.count; ++f) {
      for (auto& z : fimg) z = Cplx(0.0, 0.0);
      for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t x = 0; x < n; ++x) {
          fimg[y * p + x] = Cplx(img[(y * n + x) * chan + c], 0.0);
        }
      }
      fft2_inplace(fimg, p, false, op_count);

      const double* wf = bank.filter(f);
      for (auto& z : ffil) z = Cplx(0.0, 0.0);
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          ffil[i * p + j] = Cplx(wf[i * k + j], 0.0);
        }
      }
      fft2_inplace(ffil, p, false, op_count);

      // Spectrum product against the conjugate realizes correlation
      // without flipping the filter.
      for (std::size_t i = 0; i < p * p; ++i) {
        prod[i] = fimg[i] * std::conj(ffil[i]);
      }
      if (op_count != nullptr) *op_count += p * p;
      fft2_inplace(prod, p, true, op_count);

      for (std::size_t y = 0; y < m; ++y) {
        for (std::size_t x = 0; x < m; ++x) {
          out[(y * m + x) * bank.count + f] += prod[y * p + x].real();
        }
      }
    }
  }
}

}  // namespace pipeplan
