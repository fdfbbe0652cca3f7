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

#include "ops.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "common.hpp"
#include "convolution.hpp"
#include "pca.hpp"
#include "rng.hpp"
#include "solvers.hpp"
#include "text_ops.hpp"

namespace pipeplan {

void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t want = threads < 1 ? 1 : static_cast<std::size_t>(threads);
  const std::size_t t = std::min(want, n);
  if (t <= 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(t);
  const std::size_t chunk = (n + t - 1) / t;
  for (std::size_t i = 0; i < t; ++i) {
    const std::size_t lo = i * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(fn, lo, hi);
  }
  for (auto& th : pool) th.join();
}

std::uint64_t op_seed(const LogicalNode& node, std::uint64_t pipeline_seed) {
  // FNV-1a over kind + canonical params: two structurally identical
  // nodes draw identical streams even with different ids.
  const std::string key =
      std::string(op_kind_name(node.kind)) + "|" + node.params.canonical();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : key) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return derive_seed(pipeline_seed, h);
}

namespace {

template <typename T>
ValuePtr wrap(T body) {
  return std::make_shared<Value>(std::move(body));
}

const DenseData& as_dense(const ValuePtr& v, const char* who) {
  const auto* p = std::get_if<DenseData>(v.get());
  check(p != nullptr, ErrorCode::kTypeMismatch,
        std::string(who) + ": expected dense input");
  return *p;
}

const SparseData* maybe_sparse(const ValuePtr& v) {
  return std::get_if<SparseData>(v.get());
}

const ImageData& as_images(const ValuePtr& v, const char* who) {
  const auto* p = std::get_if<ImageData>(v.get());
  check(p != nullptr, ErrorCode::kTypeMismatch,
        std::string(who) + ": expected image input");
  return *p;
}

const TextData& as_text(const ValuePtr& v, const char* who) {
  const auto* p = std::get_if<TextData>(v.get());
  check(p != nullptr, ErrorCode::kTypeMismatch,
        std::string(who) + ": expected text input");
  return *p;
}

template <typename T>
const T& as_model(const ValuePtr& v, const char* who) {
  const auto* md = std::get_if<ModelData>(v.get());
  check(md != nullptr, ErrorCode::kTypeMismatch,
        std::string(who) + ": expected model input");
  const auto* p = std::get_if<T>(&md->m);
  check(p != nullptr, ErrorCode::kTypeMismatch,
        std::string(who) + ": wrong model flavor");
  return *p;
}

// ----- sources ------------------------------------------------------------

ValuePtr synth_dense(std::size_t n, std::size_t d, Rng* rng) {
  DenseData out;
  out.n = n;
  out.d = d;
  out.v.resize(n * d);
  for (double& x : out.v) x = rng->normal();
  return wrap(std::move(out));
}

ValuePtr synth_sparse(std::size_t n, std::size_t d, double density, Rng* rng) {
  check(density > 0.0 && density <= 1.0, ErrorCode::kInvalidArgument,
        "sparse density must be in (0, 1]");
  SparseData out;
  out.n = n;
  out.d = d;
  out.rows.resize(n);
  const double logq = std::log1p(-density);
  for (std::size_t r = 0; r < n; ++r) {
    // Geometric gap sampling: O(nnz) instead of O(d) per row.
    double j = density >= 1.0
                   ? 0.0
                   : std::floor(std::log(std::max(rng->uniform(), 1e-300)) /
                                logq);
    while (j < static_cast<double>(d)) {
      out.rows[r].emplace_back(static_cast<std::uint32_t>(j), rng->normal());
      const double gap =
          density >= 1.0
              ? 1.0
              : 1.0 + std::floor(std::log(std::max(rng->uniform(), 1e-300)) /
                                 logq);
      j += gap;
    }
  }
  return wrap(std::move(out));
}

ValuePtr synth_images(std::size_t n, std::size_t side, std::size_t chan,
                      Rng* rng) {
  ImageData out;
  out.count = n;
  out.height = side;
  out.width = side;
  out.chan = chan;
  out.v.resize(n * side * side * chan);
  for (double& x : out.v) x = rng->uniform();
  return wrap(std::move(out));
}

ValuePtr synth_text(std::size_t n, std::size_t vocab, std::size_t wmin,
                    std::size_t wmax, Rng* rng) {
  check(vocab >= 1 && wmin >= 1 && wmax >= wmin, ErrorCode::kInvalidArgument,
        "text source needs vocab >= 1 and 1 <= wmin <= wmax");
  TextData out;
  out.lines.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t words = wmin + rng->below(wmax - wmin + 1);
    std::string line;
    for (std::size_t w = 0; w < words; ++w) {
      const double u = rng->uniform();
      const std::size_t idx =
          std::min(vocab - 1, static_cast<std::size_t>(u * u * vocab));
      if (w > 0) line.push_back(' ');
      line += "w" + std::to_string(idx);
    }
    out.lines.push_back(std::move(line));
  }
  return wrap(std::move(out));
}

ValuePtr synth_labels(std::size_t n, std::size_t classes, Rng* rng) {
  check(classes >= 2, ErrorCode::kInvalidArgument, "need >= 2 classes");
  DenseData out;
  out.n = n;
  if (classes == 2) {
    out.d = 1;
    out.v.resize(n);
    for (double& x : out.v) x = rng->uniform() < 0.5 ? -1.0 : 1.0;
  } else {
    out.d = classes;
    out.v.assign(n * classes, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      out.v[r * classes + rng->below(classes)] = 1.0;
    }
  }
  return wrap(std::move(out));
}

// ----- element maps -------------------------------------------------------

ValuePtr map_grayscale(const ImageData& in, int threads) {
  ImageData out;
  out.count = in.count;
  out.height = in.height;
  out.width = in.width;
  out.chan = 1;
  out.v.resize(out.count * out.height * out.width);
  const std::size_t hw = in.height * in.width;
  parallel_for(in.count, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const double* src = in.image(i);
      double* dst = out.v.data() + i * hw;
      for (std::size_t p = 0; p < hw; ++p) {
        double acc = 0.0;
        for (std::size_t c = 0; c < in.chan; ++c) acc += src[p * in.chan + c];
        dst[p] = acc / static_cast<double>(in.chan);
      }
    }
  });
  return wrap(std::move(out));
}

ValuePtr map_pool2(const ImageData& in, int threads) {
  check(in.height >= 2 && in.width >= 2, ErrorCode::kInvalidArgument,
        "pool2 needs images at least 2x2");
  ImageData out;
  out.count = in.count;
  out.height = in.height / 2;
  out.width = in.width / 2;
  out.chan = in.chan;
  out.v.resize(out.count * out.per_image());
  parallel_for(in.count, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const double* src = in.image(i);
      double* dst = out.v.data() + i * out.per_image();
      for (std::size_t y = 0; y < out.height; ++y) {
        for (std::size_t x = 0; x < out.width; ++x) {
          for (std::size_t c = 0; c < out.chan; ++c) {
            double acc = 0.0;
            for (std::size_t dy = 0; dy < 2; ++dy) {
              for (std::size_t dx = 0; dx < 2; ++dx) {
                acc +=
                    src[((2 * y + dy) * in.width + (2 * x + dx)) * in.chan + c];
              }
            }
            dst[(y * out.width + x) * out.chan + c] = acc * 0.25;
          }
        }
      }
    }
  });
  return wrap(std::move(out));
}

ValuePtr map_flatten(const ImageData& in) {
  DenseData out;
  out.n = in.count;
  out.d = in.per_image();
  out.v = in.v;  // same row-major layout, reinterpreted
  return wrap(std::move(out));
}

ValuePtr map_dense(const DenseData& in, const std::string& fn, double factor,
                   int repeat, int threads) {
  DenseData out;
  out.n = in.n;
  out.d = in.d;
  out.v.resize(in.v.size());
  parallel_for(in.n, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r) {
      const double* src = in.row(r);
      double* dst = out.v.data() + r * out.d;
      for (std::size_t j = 0; j < in.d; ++j) dst[j] = src[j];
      for (int it = 0; it < repeat; ++it) {
        if (fn == "scale") {
          for (std::size_t j = 0; j < in.d; ++j) dst[j] *= factor;
        } else if (fn == "relu") {
          for (std::size_t j = 0; j < in.d; ++j) dst[j] = std::max(0.0, dst[j]);
        } else if (fn == "sqrtabs") {
          for (std::size_t j = 0; j < in.d; ++j) {
            dst[j] = std::copysign(std::sqrt(std::fabs(dst[j])), dst[j]);
          }
        } else {  // normalize
          double nrm = 0.0;
          for (std::size_t j = 0; j < in.d; ++j) nrm += dst[j] * dst[j];
          nrm = std::sqrt(nrm);
          if (nrm > 0.0) {
            for (std::size_t j = 0; j < in.d; ++j) dst[j] /= nrm;
          }
        }
      }
    }
  });
  return wrap(std::move(out));
}

// ----- gather -------------------------------------------------------------

ValuePtr gather_rows(const std::vector<ValuePtr>& inputs, TypeTag out_tag,
                     int threads) {
  std::size_t n = 0;
  bool first = true;
  for (const auto& in : inputs) {
    const std::size_t r = value_records(*in);
    check(first || r == n, ErrorCode::kExecution,
          "gather inputs disagree on record count");
    n = r;
    first = false;
  }
  if (out_tag == TypeTag::kDenseVec) {
    std::size_t d = 0;
    for (const auto& in : inputs) d += as_dense(in, "Gather").d;
    DenseData out;
    out.n = n;
    out.d = d;
    out.v.resize(n * d);
    parallel_for(n, threads, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t r = lo; r < hi; ++r) {
        double* dst = out.v.data() + r * d;
        std::size_t off = 0;
        for (const auto& in : inputs) {
          const DenseData& dd = as_dense(in, "Gather");
          const double* src = dd.row(r);
          for (std::size_t j = 0; j < dd.d; ++j) dst[off + j] = src[j];
          off += dd.d;
        }
      }
    });
    return wrap(std::move(out));
  }
  SparseData out;
  out.n = n;
  out.d = 0;
  out.rows.resize(n);
  std::vector<std::size_t> offsets;
  for (const auto& in : inputs) {
    offsets.push_back(out.d);
    if (const SparseData* sp = maybe_sparse(in)) {
      out.d += sp->d;
    } else {
      out.d += as_dense(in, "Gather").d;
    }
  }
  parallel_for(n, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r) {
      auto& row = out.rows[r];
      for (std::size_t s = 0; s < inputs.size(); ++s) {
        const std::uint32_t off = static_cast<std::uint32_t>(offsets[s]);
        if (const SparseData* sp = maybe_sparse(inputs[s])) {
          for (const auto& [j, x] : sp->rows[r]) row.emplace_back(off + j, x);
        } else {
          const DenseData& dd = as_dense(inputs[s], "Gather");
          const double* src = dd.row(r);
          for (std::size_t j = 0; j < dd.d; ++j) {
            if (src[j] != 0.0) {
              row.emplace_back(off + static_cast<std::uint32_t>(j), src[j]);
            }
          }
        }
      }
    }
  });
  return wrap(std::move(out));
}

// ----- learned operators --------------------------------------------------

ValuePtr fit_solver(const LogicalNode& node, const std::vector<ValuePtr>& inputs,
                    const std::string& impl) {
  const auto* labels = std::get_if<DenseData>(inputs[1].get());
  check(labels != nullptr, ErrorCode::kTypeMismatch,
        "LinearSolver: expected numeric labels");
  Mat B(labels->n, labels->d);
  B.a = labels->v;

  const SparseData* sp = maybe_sparse(inputs[0]);
  const int iters = static_cast<int>(node.params.get_num("iters", 20));
  SolverCounters counters;
  Mat W;
  const std::string route = impl.empty() ? "LocalQR" : impl;
  if (route == "LBFGS") {
    LbfgsOptions opt;
    opt.iters = iters;
    if (sp != nullptr) {
      W = solve_lbfgs(*sp, B, opt, &counters);
    } else {
      const DenseData& X = as_dense(inputs[0], "LinearSolver");
      Mat A(X.n, X.d);
      A.a = X.v;
      W = solve_lbfgs(A, B, opt, &counters);
    }
  } else {
    Mat A;
    if (sp != nullptr) {
      A = densify(*sp);
    } else {
      const DenseData& X = as_dense(inputs[0], "LinearSolver");
      A = Mat(X.n, X.d);
      A.a = X.v;
    }
    if (route == "BlockSolve") {
      const std::size_t b = static_cast<std::size_t>(node.params.get_num(
          "block", static_cast<double>(default_block_width(A.cols))));
      W = solve_block(A, B, b, iters, &counters);
    } else if (route == "LocalQR" || route == "DistQR") {
      W = solve_exact_qr(A, B);
    } else {
      fail(ErrorCode::kInvalidArgument, "unknown solver route '" + route + "'");
    }
  }
  ModelData m;
  LinearModel lm;
  lm.weights = std::move(W);
  m.m = std::move(lm);
  return wrap(std::move(m));
}

ValuePtr apply_solver(const std::vector<ValuePtr>& inputs, int threads) {
  const LinearModel& lm = as_model<LinearModel>(inputs[1], "LinearSolver");
  const Mat& W = lm.weights;
  DenseData out;
  if (const SparseData* sp = maybe_sparse(inputs[0])) {
    check(sp->d == W.rows, ErrorCode::kExecution,
          "prediction width mismatch with model");
    out.n = sp->n;
    out.d = W.cols;
    out.v.assign(out.n * out.d, 0.0);
    parallel_for(sp->n, threads, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t r = lo; r < hi; ++r) {
        double* dst = out.v.data() + r * out.d;
        for (const auto& [j, x] : sp->rows[r]) {
          const double* wr = W.row(j);
          for (std::size_t c = 0; c < W.cols; ++c) dst[c] += x * wr[c];
        }
      }
    });
  } else {
    const DenseData& X = as_dense(inputs[0], "LinearSolver");
    check(X.d == W.rows, ErrorCode::kExecution,
          "prediction width mismatch with model");
    out.n = X.n;
    out.d = W.cols;
    out.v.assign(out.n * out.d, 0.0);
    parallel_for(X.n, threads, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t r = lo; r < hi; ++r) {
        const double* src = X.row(r);
        double* dst = out.v.data() + r * out.d;
        for (std::size_t j = 0; j < X.d; ++j) {
          const double x = src[j];
          if (x == 0.0) continue;
          const double* wr = W.row(j);
          for (std::size_t c = 0; c < W.cols; ++c) dst[c] += x * wr[c];
        }
      }
    });
  }
  return wrap(std::move(out));
}

ValuePtr fit_pca(const LogicalNode& node, const std::vector<ValuePtr>& inputs,
                 const OpContext& ctx, const std::string& impl) {
  const DenseData& X = as_dense(inputs[0], "PCA");
  Mat A(X.n, X.d);
  A.a = X.v;
  const std::size_t k = static_cast<std::size_t>(node.params.get_num("k", 2));
  const std::string route = impl.empty() ? "SVD" : impl;
  PcaResult r;
  if (route == "SVD" || route == "DistSVD") {
    r = pca_svd(A, k);
  } else if (route == "TSVD" || route == "DistTSVD") {
    r = pca_tsvd(A, k, 10, 2, op_seed(node, ctx.seed));
  } else {
    fail(ErrorCode::kInvalidArgument, "unknown pca route '" + route + "'");
  }
  ModelData m;
  PcaModel pm;
  pm.mean = std::move(r.mean);
  pm.components = std::move(r.components);
  m.m = std::move(pm);
  return wrap(std::move(m));
}

ValuePtr apply_pca(const std::vector<ValuePtr>& inputs, int threads) {
  const PcaModel& pm = as_model<PcaModel>(inputs[1], "PCA");
  const DenseData& X = as_dense(inputs[0], "PCA");
  check(X.d == pm.components.rows, ErrorCode::kExecution,
        "projection width mismatch with model");
  DenseData out;
  out.n = X.n;
  out.d = pm.components.cols;
  out.v.assign(out.n * out.d, 0.0);
  parallel_for(X.n, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r) {
      const double* src = X.row(r);
      double* dst = out.v.data() + r * out.d;
      for (std::size_t j = 0; j < X.d; ++j) {
        const double x = src[j] - pm.mean[j];
        const double* pr = pm.components.row(j);
        for (std::size_t c = 0; c < out.d; ++c) dst[c] += x * pr[c];
      }
    }
  });
  return wrap(std::move(out));
}

ValuePtr run_convolution(const LogicalNode& node,
                         const std::vector<ValuePtr>& inputs,
                         const OpContext& ctx, const std::string& impl) {
  const ImageData& in = as_images(inputs[0], "Convolution");
  check(in.height == in.width, ErrorCode::kInvalidArgument,
        "convolution needs square images");
  const std::size_t b = static_cast<std::size_t>(node.params.get_num("b", 1));
  const std::size_t kf = static_cast<std::size_t>(node.params.get_num("k", 3));
  const bool sep = node.params.get_num("separable", 0) != 0.0;
  const std::uint64_t fseed = op_seed(node, ctx.seed);
  const FilterBank bank = sep ? FilterBank::random_separable(b, kf, fseed)
                              : FilterBank::random(b, kf, fseed);
  const std::string route = impl.empty() ? "MatMul" : impl;
  check(kf <= in.height, ErrorCode::kInvalidArgument,
        "filter larger than image");

  ImageData out;
  out.count = in.count;
  out.height = in.height - kf + 1;
  out.width = out.height;
  out.chan = b;
  out.v.resize(out.count * out.per_image());
  parallel_for(in.count, ctx.threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const double* src = in.image(i);
      double* dst = out.v.data() + i * out.per_image();
      if (route == "MatMul") {
        convolve_matmul(src, in.height, in.chan, bank, dst);
      } else if (route == "FFT") {
        convolve_fft(src, in.height, in.chan, bank, dst);
      } else if (route == "Separable") {
        check(sep, ErrorCode::kInvalidArgument,
              "separable route needs separable=1 filters");
        convolve_separable(src, in.height, in.chan, bank, dst);
      } else {
        fail(ErrorCode::kInvalidArgument,
             "unknown convolution route '" + route + "'");
      }
    }
  });
  return wrap(std::move(out));
}

}  // namespace

ValuePtr generate_source(const LogicalNode& node, const OpContext& ctx) {
  if (ctx.bindings != nullptr) {
    auto it = ctx.bindings->by_node.find(node.id);
    if (it != ctx.bindings->by_node.end()) return it->second;
  }
  Rng rng(op_seed(node, ctx.seed));
  const std::size_t n = static_cast<std::size_t>(node.params.get_num("n", 1000));
  check(n >= 1, ErrorCode::kInvalidArgument, "source needs n >= 1");
  if (node.kind == OpKind::kLabelSource) {
    return synth_labels(
        n, static_cast<std::size_t>(node.params.get_num("classes", 2)), &rng);
  }
  const std::string format = node.params.get_str("format", "dense");
  if (format == "dense" || format == "csv") {
    return synth_dense(
        n, static_cast<std::size_t>(node.params.get_num("d", 10)), &rng);
  }
  if (format == "sparse") {
    return synth_sparse(
        n, static_cast<std::size_t>(node.params.get_num("d", 100)),
        node.params.get_num("s", 0.01), &rng);
  }
  if (format == "images") {
    return synth_images(
        n, static_cast<std::size_t>(node.params.get_num("side", 16)),
        static_cast<std::size_t>(node.params.get_num("chan", 1)), &rng);
  }
  if (format == "text") {
    return synth_text(
        n, static_cast<std::size_t>(node.params.get_num("vocab", 1000)),
        static_cast<std::size_t>(node.params.get_num("wmin", 5)),
        static_cast<std::size_t>(node.params.get_num("wmax", 15)), &rng);
  }
  fail(ErrorCode::kParse, "unknown source format '" + format + "'");
}

ValuePtr eval_op(const LogicalNode& node, TypeTag out_tag,
                 const std::vector<ValuePtr>& inputs, const OpContext& ctx,
                 const std::string& impl) {
  switch (node.kind) {
    case OpKind::kDataSource:
    case OpKind::kLabelSource:
      return generate_source(node, ctx);
    case OpKind::kTokenize: {
      const TextData& in = as_text(inputs[0], "Tokenize");
      TextData out;
      out.lines.resize(in.lines.size());
      parallel_for(in.lines.size(), ctx.threads,
                   [&](std::size_t lo, std::size_t hi) {
                     for (std::size_t i = lo; i < hi; ++i) {
                       auto toks = tokenize_line(in.lines[i]);
                       std::string s;
                       for (std::size_t j = 0; j < toks.size(); ++j) {
                         if (j > 0) s.push_back(' ');
                         s += toks[j];
                       }
                       out.lines[i] = std::move(s);
                     }
                   });
      return wrap(std::move(out));
    }
    case OpKind::kNGrams: {
      const TextData& in = as_text(inputs[0], "NGrams");
      const std::size_t nw = static_cast<std::size_t>(node.params.get_num("n", 2));
      TextData out;
      out.lines.resize(in.lines.size());
      parallel_for(in.lines.size(), ctx.threads,
                   [&](std::size_t lo, std::size_t hi) {
                     for (std::size_t i = lo; i < hi; ++i) {
                       std::vector<std::string> toks;
                       std::string cur;
                       for (char c : in.lines[i]) {
                         if (c == ' ') {
                           if (!cur.empty()) toks.push_back(std::move(cur));
                           cur.clear();
                         } else {
                           cur.push_back(c);
                         }
                       }
                       if (!cur.empty()) toks.push_back(std::move(cur));
                       auto grams = make_ngrams(toks, nw);
                       // Grams keep internal spaces, so records join on tabs.
                       std::string s;
                       for (std::size_t j = 0; j < grams.size(); ++j) {
                         if (j > 0) s.push_back('\t');
                         s += grams[j];
                       }
                       out.lines[i] = std::move(s);
                     }
                   });
      return wrap(std::move(out));
    }
    case OpKind::kTopKFeatures:
    case OpKind::kTermFrequency: {
      const TextData& in = as_text(inputs[0], node.kind == OpKind::kTopKFeatures
                                                  ? "TopKFeatures"
                                                  : "TermFrequency");
      TokenData grams;
      grams.records.resize(in.lines.size());
      parallel_for(in.lines.size(), ctx.threads,
                   [&](std::size_t lo, std::size_t hi) {
                     for (std::size_t i = lo; i < hi; ++i) {
                       const std::string& line = in.lines[i];
                       const char sep =
                           line.find('\t') != std::string::npos ? '\t' : ' ';
                       std::string cur;
                       for (char c : line) {
                         if (c == sep) {
                           if (!cur.empty()) {
                             grams.records[i].push_back(std::move(cur));
                           }
                           cur.clear();
                         } else {
                           cur.push_back(c);
                         }
                       }
                       if (!cur.empty()) grams.records[i].push_back(std::move(cur));
                     }
                   });
      if (node.kind == OpKind::kTopKFeatures) {
        const std::size_t k =
            static_cast<std::size_t>(node.params.get_num("k", 1000));
        ModelData m;
        m.m = top_k_features(grams, k);
        return wrap(std::move(m));
      }
      const VocabModel& vocab = as_model<VocabModel>(inputs[1], "TermFrequency");
      return wrap(term_frequency(grams, vocab));
    }
    case OpKind::kLinearSolver:
      if (out_tag == TypeTag::kModel) return fit_solver(node, inputs, impl);
      return apply_solver(inputs, ctx.threads);
    case OpKind::kPca:
      if (out_tag == TypeTag::kModel) return fit_pca(node, inputs, ctx, impl);
      return apply_pca(inputs, ctx.threads);
    case OpKind::kConvolution:
      return run_convolution(node, inputs, ctx, impl);
    case OpKind::kElementMap: {
      const std::string fn = node.params.get_str("fn", "scale");
      const int repeat = static_cast<int>(node.params.get_num("repeat", 1));
      check(repeat >= 1, ErrorCode::kInvalidArgument, "repeat must be >= 1");
      if (fn == "grayscale" || fn == "pool2" || fn == "flatten") {
        check(repeat == 1, ErrorCode::kInvalidArgument,
              "repeat applies only to elementwise functions");
        const ImageData& in = as_images(inputs[0], "ElementMap");
        if (fn == "grayscale") return map_grayscale(in, ctx.threads);
        if (fn == "pool2") return map_pool2(in, ctx.threads);
        return map_flatten(in);
      }
      const DenseData& in = as_dense(inputs[0], "ElementMap");
      return map_dense(in, fn, node.params.get_num("factor", 1.0), repeat,
                       ctx.threads);
    }
    case OpKind::kGather:
      return gather_rows(inputs, out_tag, ctx.threads);
  }
  fail(ErrorCode::kInternal, "unhandled operator kind");
}

ValuePtr slice_records(const ValuePtr& v, const std::vector<std::size_t>& idx) {
  if (const auto* t = std::get_if<TextData>(v.get())) {
    TextData s;
    s.lines.reserve(idx.size());
    for (std::size_t i : idx) s.lines.push_back(t->lines.at(i));
    return wrap(std::move(s));
  }
  if (const auto* t2 = std::get_if<TokenData>(v.get())) {
    TokenData s;
    s.records.reserve(idx.size());
    for (std::size_t i : idx) s.records.push_back(t2->records.at(i));
    return wrap(std::move(s));
  }
  if (const auto* d = std::get_if<DenseData>(v.get())) {
    DenseData s;
    s.n = idx.size();
    s.d = d->d;
    s.v.reserve(idx.size() * d->d);
    for (std::size_t i : idx) {
      check(i < d->n, ErrorCode::kInvalidArgument, "record index out of range");
      s.v.insert(s.v.end(), d->row(i), d->row(i) + d->d);
    }
    return wrap(std::move(s));
  }
  if (const auto* sp = std::get_if<SparseData>(v.get())) {
    SparseData s;
    s.n = idx.size();
    s.d = sp->d;
    s.rows.reserve(idx.size());
    for (std::size_t i : idx) s.rows.push_back(sp->rows.at(i));
    return wrap(std::move(s));
  }
  if (const auto* im = std::get_if<ImageData>(v.get())) {
    ImageData s;
    s.count = idx.size();
    s.height = im->height;
    s.width = im->width;
    s.chan = im->chan;
    s.v.reserve(idx.size() * im->per_image());
    for (std::size_t i : idx) {
      check(i < im->count, ErrorCode::kInvalidArgument,
            "record index out of range");
      s.v.insert(s.v.end(), im->image(i), im->image(i) + im->per_image());
    }
    return wrap(std::move(s));
  }
  return v;  // models carry no records
}

}  // namespace pipeplan
