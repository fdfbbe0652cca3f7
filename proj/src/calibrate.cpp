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

#include "calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <vector>

#include "common.hpp"
#include "convolution.hpp"
#include "matrix.hpp"
#include "pca.hpp"
#include "rng.hpp"
#include "solvers.hpp"
#include "synth.hpp"

namespace pipeplan {

namespace {

template <typename Fn>
double best_of(int reps, Fn&& fn) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < std::max(1, reps); ++i) {
    const double t0 = now_sec();
    fn();
    best = std::min(best, now_sec() - t0);
  }
  return std::max(best, 1e-9);
}

// Least squares through the origin: measured ~ m * predicted.
struct Fit {
  double num = 0;
  double den = 0;
  void add(double pred, double meas) {
    num += meas * pred;
    den += pred * pred;
  }
  double scale() const { return den > 0 ? num / den : 1.0; }
};

DatasetStats dense_stats(double n, double d, double k) {
  DatasetStats s;
  s.n = n;
  s.d = d;
  s.k = k;
  s.s = 1.0;
  s.bytes_per_record = d * kBytesPerScalar;
  return s;
}

DatasetStats sparse_stats(double n, double d, double density, double k) {
  DatasetStats s;
  s.n = n;
  s.d = d;
  s.k = k;
  s.s = density;
  s.bytes_per_record = 2.0 * density * d * kBytesPerScalar;
  return s;
}

}  // namespace

double measure_cpu_throughput(std::uint64_t seed, int reps) {
  const std::size_t n = 288;
  const Mat a = random_dense(n, n, derive_seed(seed, 0xc1));
  const Mat b = random_dense(n, n, derive_seed(seed, 0xc2));
  volatile double sink = 0;
  const double dt = best_of(reps, [&] {
    Mat c = matmul(a, b);
    sink = sink + c.at(0, 0);
  });
  const double madds = static_cast<double>(n) * n * n;
  return madds / dt;
}

double measure_mem_bandwidth(std::uint64_t seed, int reps) {
  (void)seed;
  const std::size_t n = 8u << 20;  // 64 MB of doubles
  std::vector<double> src(n, 1.0), dst(n, 0.0);
  const double dt = best_of(reps, [&] {
    std::memcpy(dst.data(), src.data(), n * sizeof(double));
  });
  return 2.0 * static_cast<double>(n) * sizeof(double) / dt;
}

Calibration calibrate_desk(std::uint64_t seed) {
  Calibration cal;
  cal.cluster = ClusterResourceDescriptor{};
  cal.cluster.workers = 1;
  cal.cluster.cpu_throughput = measure_cpu_throughput(seed);
  cal.cluster.mem_bandwidth = measure_mem_bandwidth(seed);
  const ClusterResourceDescriptor& r = cal.cluster;
  const ImplMultipliers unit;

  auto note = [&](const char* impl, double pred, double meas) {
    std::ostringstream os;
    os << impl << ": predicted " << pred << " s, measured " << meas << " s";
    cal.log.push_back(os.str());
  };

  // --- Least-squares solvers: two timed problems per implementation. ---
  struct DenseProblem {
    Mat a, b;
    DatasetStats stats;
  };
  const double iters = 10;
  std::vector<DenseProblem> dense;
  for (auto [n, d, k] : {std::array<std::size_t, 3>{1200, 80, 4},
                         std::array<std::size_t, 3>{2500, 140, 6}}) {
    DenseProblem p;
    p.a = random_dense(n, d, derive_seed(seed, 0xd0 + n));
    p.b = random_dense(n, k, derive_seed(seed, 0xd1 + n));
    p.stats = dense_stats(static_cast<double>(n), static_cast<double>(d),
                          static_cast<double>(k));
    dense.push_back(std::move(p));
  }

  for (SolverImpl impl : {SolverImpl::kLocalQR, SolverImpl::kDistQR,
                          SolverImpl::kBlockSolve}) {
    Fit fit;
    for (const DenseProblem& p : dense) {
      const double block = default_block_width(p.stats.d);
      const double pred =
          combine(solver_cost(impl, p.stats, iters, block, r, unit), r);
      const double meas = best_of(2, [&] {
        if (impl == SolverImpl::kBlockSolve) {
          solve_block(p.a, p.b, static_cast<std::size_t>(block),
                      static_cast<int>(iters), nullptr);
        } else {
          solve_exact_qr(p.a, p.b);
        }
      });
      fit.add(pred, meas);
      note(solver_impl_name(impl), pred, meas);
    }
    cal.multipliers.set(solver_impl_name(impl), "exec", fit.scale());
  }
  {
    // The gradient method is fitted on one dense and one sparse problem
    // so its multiplier averages both kernels.
    Fit fit;
    LbfgsOptions opt;
    opt.iters = static_cast<int>(iters);
    opt.grad_rtol = 0;
    {
      const DenseProblem& p = dense[0];
      const double pred = combine(
          solver_cost(SolverImpl::kLbfgs, p.stats, iters, 1, r, unit), r);
      const double meas =
          best_of(2, [&] { solve_lbfgs(p.a, p.b, opt, nullptr); });
      fit.add(pred, meas);
      note("LBFGS", pred, meas);
    }
    {
      const std::size_t n = 20000, d = 2000, k = 4;
      const double density = 0.01;
      const SparseData sa =
          random_sparse(n, d, density, derive_seed(seed, 0xd7));
      const Mat sb = random_dense(n, k, derive_seed(seed, 0xd8));
      const DatasetStats st =
          sparse_stats(static_cast<double>(n), static_cast<double>(d),
                       density, static_cast<double>(k));
      const double pred = combine(
          solver_cost(SolverImpl::kLbfgs, st, iters, 1, r, unit), r);
      const double meas =
          best_of(2, [&] { solve_lbfgs(sa, sb, opt, nullptr); });
      fit.add(pred, meas);
      note("LBFGS", pred, meas);
    }
    cal.multipliers.set("LBFGS", "exec", fit.scale());
  }

  // --- Principal components: exact and randomized, two problems each. ---
  {
    Fit fit_svd, fit_tsvd;
    for (auto [n, d, k] : {std::array<std::size_t, 3>{1500, 120, 10},
                           std::array<std::size_t, 3>{3000, 80, 8}}) {
      const Mat a = random_dense(n, d, derive_seed(seed, 0xe0 + n));
      const DatasetStats st = dense_stats(
          static_cast<double>(n), static_cast<double>(d), 1);
      const double k_d = static_cast<double>(k);
      const double pred_svd =
          combine(pca_cost(PcaImpl::kSvd, st, k_d, r, unit), r);
      const double meas_svd = best_of(2, [&] { pca_svd(a, k); });
      fit_svd.add(pred_svd, meas_svd);
      note("SVD", pred_svd, meas_svd);
      const double pred_tsvd =
          combine(pca_cost(PcaImpl::kTsvd, st, k_d, r, unit), r);
      const double meas_tsvd =
          best_of(2, [&] { pca_tsvd(a, k, 10, 2, derive_seed(seed, 0xe7)); });
      fit_tsvd.add(pred_tsvd, meas_tsvd);
      note("TSVD", pred_tsvd, meas_tsvd);
    }
    cal.multipliers.set("SVD", "exec", fit_svd.scale());
    cal.multipliers.set("TSVD", "exec", fit_tsvd.scale());
    cal.multipliers.set("DistSVD", "exec", fit_svd.scale());
    cal.multipliers.set("DistTSVD", "exec", fit_tsvd.scale());
  }
  // --- Convolution schemes: two image shapes per implementation. ---
  {
    Fit fit_mm, fit_sep, fit_fft;
    struct ConvProblem {
      std::size_t count, side, chan, b, k;
    };
    for (const ConvProblem& cp :
         {ConvProblem{40, 20, 3, 4, 3}, ConvProblem{30, 28, 1, 6, 5}}) {
      const ImageData imgs = random_images(cp.count, cp.side, cp.chan,
                                           derive_seed(seed, 0xf0 + cp.side));
      const FilterBank bank = FilterBank::random_separable(
          cp.b, cp.k, derive_seed(seed, 0xf1 + cp.side));
      const std::size_t m = cp.side - cp.k + 1;
      std::vector<double> out(cp.count * m * m * cp.b);
      auto run_all = [&](auto&& one) {
        for (std::size_t i = 0; i < cp.count; ++i) {
          one(imgs.image(i), out.data() + i * m * m * cp.b);
        }
      };
      const double scale = static_cast<double>(cp.count);
      const double n_d = static_cast<double>(cp.side);
      const double chan_d = static_cast<double>(cp.chan);
      const double b_d = static_cast<double>(cp.b);
      const double k_d = static_cast<double>(cp.k);

      double pred = scale * combine(conv_cost(ConvImpl::kMatMul, n_d, chan_d,
                                              b_d, k_d, r, unit),
                                    r);
      double meas = best_of(2, [&] {
        run_all([&](const double* img, double* o) {
          convolve_matmul(img, cp.side, cp.chan, bank, o);
        });
      });
      fit_mm.add(pred, meas);
      note("MatMul", pred, meas);

      pred = scale * combine(conv_cost(ConvImpl::kSeparable, n_d, chan_d, b_d,
                                       k_d, r, unit),
                             r);
      meas = best_of(2, [&] {
        run_all([&](const double* img, double* o) {
          convolve_separable(img, cp.side, cp.chan, bank, o);
        });
      });
      fit_sep.add(pred, meas);
      note("Separable", pred, meas);

      pred = scale * combine(conv_cost(ConvImpl::kFft, n_d, chan_d, b_d, k_d,
                                       r, unit),
                             r);
      meas = best_of(2, [&] {
        run_all([&](const double* img, double* o) {
          convolve_fft(img, cp.side, cp.chan, bank, o);
        });
      });
      fit_fft.add(pred, meas);
      note("FFT", pred, meas);
    }
    cal.multipliers.set("MatMul", "exec", fit_mm.scale());
    cal.multipliers.set("Separable", "exec", fit_sep.scale());
    cal.multipliers.set("FFT", "exec", fit_fft.scale());
  }
  return cal;
}

}  // namespace pipeplan
