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
#include <cstdint>
#include <vector>

#include "convolution.hpp"
#include "rng.hpp"

namespace pipeplan {
namespace {

std::vector<double> random_image(std::size_t n, std::size_t chan, Rng* rng) {
  std::vector<double> img(n * n * chan);
  for (double& v : img) v = rng->normal();
  return img;
}

// Direct definition, written as the plain quadruple loop over output
// position, filter, tap row and tap column, summing channels.
std::vector<double> naive_convolve(const std::vector<double>& img,
                                   std::size_t n, std::size_t chan,
                                   const FilterBank& bank) {
  std::size_t k = bank.side;
  std::size_t m = n - k + 1;
  std::vector<double> out(m * m * bank.count, 0.0);
  for (std::size_t y = 0; y < m; ++y)
    for (std::size_t x = 0; x < m; ++x)
      for (std::size_t f = 0; f < bank.count; ++f) {
        const double* w = bank.filter(f);
        double s = 0.0;
        for (std::size_t dy = 0; dy < k; ++dy)
          for (std::size_t dx = 0; dx < k; ++dx)
            for (std::size_t c = 0; c < chan; ++c)
              s += w[dy * k + dx] *
                   img[((y + dy) * n + (x + dx)) * chan + c];
        out[(y * m + x) * bank.count + f] = s;
      }
  return out;
}

double max_abs_diff(const std::vector<double>& a,
                    const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

TEST_CASE("convolve_matmul matches the direct definition") {
  Rng rng(51);
  for (std::size_t k : {3u, 5u}) {
    std::size_t n = 12, chan = 3;
    FilterBank bank = FilterBank::random(4, k, 900 + k);
    std::vector<double> img = random_image(n, chan, &rng);
    std::vector<double> out((n - k + 1) * (n - k + 1) * bank.count);
    convolve_matmul(img.data(), n, chan, bank, out.data());
    CHECK(max_abs_diff(out, naive_convolve(img, n, chan, bank)) < 1e-12);
  }
}

TEST_CASE("convolve_fft matches the direct definition") {
  Rng rng(52);
  for (std::size_t k : {3u, 5u, 9u}) {
    std::size_t n = 16, chan = 2;
    FilterBank bank = FilterBank::random(3, k, 910 + k);
    std::vector<double> img = random_image(n, chan, &rng);
    std::vector<double> out((n - k + 1) * (n - k + 1) * bank.count);
    convolve_fft(img.data(), n, chan, bank, out.data());
    CHECK(max_abs_diff(out, naive_convolve(img, n, chan, bank)) < 1e-9);
  }
}

TEST_CASE("convolve_separable matches the direct definition") {
  Rng rng(53);
  std::size_t n = 14, chan = 3, k = 5;
  FilterBank bank = FilterBank::random_separable(4, k, 77);
  REQUIRE(bank.separable);
  REQUIRE(bank.factor_residual() < 1e-12);
  std::vector<double> img = random_image(n, chan, &rng);
  std::vector<double> out((n - k + 1) * (n - k + 1) * bank.count);
  convolve_separable(img.data(), n, chan, bank, out.data());
  CHECK(max_abs_diff(out, naive_convolve(img, n, chan, bank)) < 1e-10);
}

TEST_CASE("all three routes agree on a separable bank") {
  Rng rng(54);
  std::size_t n = 20, chan = 3, k = 3;
  FilterBank bank = FilterBank::random_separable(4, k, 5);
  std::vector<double> img = random_image(n, chan, &rng);
  std::size_t m = (n - k + 1) * (n - k + 1) * bank.count;
  std::vector<double> a(m), b(m), c(m);
  convolve_matmul(img.data(), n, chan, bank, a.data());
  convolve_separable(img.data(), n, chan, bank, b.data());
  convolve_fft(img.data(), n, chan, bank, c.data());
  CHECK(max_abs_diff(a, b) < 1e-10);
  CHECK(max_abs_diff(a, c) < 1e-9);
}

TEST_CASE("identity filter reproduces the channel sum") {
  std::size_t n = 6, chan = 2;
  FilterBank bank;
  bank.count = 1;
  bank.side = 1;
  bank.w = {1.0};
  std::vector<double> img(n * n * chan);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = 0.25 * i;
  std::vector<double> out(n * n);
  convolve_matmul(img.data(), n, chan, bank, out.data());
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x) {
      double want =
          img[(y * n + x) * chan] + img[(y * n + x) * chan + 1];
      CHECK(out[y * n + x] == doctest::Approx(want).epsilon(1e-14));
    }
}

TEST_CASE("correlation orientation: filter taps are not flipped") {
  // A filter that is 1 only at tap (0, 1) must read the pixel one to the
  // right of the window origin; a flipped kernel would read (k-1, k-2).
  std::size_t n = 4, chan = 1, k = 2;
  FilterBank bank;
  bank.count = 1;
  bank.side = k;
  bank.w = {0.0, 1.0, 0.0, 0.0};
  std::vector<double> img(n * n);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = i;
  std::vector<double> out((n - 1) * (n - 1));
  convolve_matmul(img.data(), n, chan, bank, out.data());
  for (std::size_t y = 0; y + 1 < n; ++y)
    for (std::size_t x = 0; x + 1 < n; ++x)
      CHECK(out[y * (n - 1) + x] ==
            doctest::Approx(img[y * n + (x + 1)]).epsilon(1e-14));
}

TEST_CASE("fft op count does not grow with filter side") {
  Rng rng(55);
  std::size_t n = 32, chan = 1;
  std::vector<double> img = random_image(n, chan, &rng);
  std::uint64_t ops3 = 0, ops9 = 0;
  {
    FilterBank bank = FilterBank::random(2, 3, 1);
    std::vector<double> out((n - 2) * (n - 2) * 2);
    convolve_fft(img.data(), n, chan, bank, out.data(), &ops3);
  }
  {
    FilterBank bank = FilterBank::random(2, 9, 1);
    std::vector<double> out((n - 8) * (n - 8) * 2);
    convolve_fft(img.data(), n, chan, bank, out.data(), &ops9);
  }
  REQUIRE(ops3 > 0);
  CHECK(ops3 == ops9);
}

TEST_CASE("random banks are reproducible by seed") {
  FilterBank a = FilterBank::random(3, 5, 42);
  FilterBank b = FilterBank::random(3, 5, 42);
  FilterBank c = FilterBank::random(3, 5, 43);
  CHECK(a.w == b.w);
  CHECK(a.w != c.w);
  CHECK(a.factor_residual() == 0.0);  // non-separable banks report 0
}

}  // namespace
}  // namespace pipeplan
