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

#include "values.hpp"

#include <cstring>

namespace pipeplan {

const char* type_tag_name(TypeTag t) {
  switch (t) {
    case TypeTag::kText: return "Text";
    case TypeTag::kSparseVec: return "SparseVec";
    case TypeTag::kDenseVec: return "DenseVec";
    case TypeTag::kDenseMatrix: return "DenseMatrix";
    case TypeTag::kImage: return "Image";
    case TypeTag::kLabels: return "Labels";
    case TypeTag::kModel: return "Model";
  }
  return "?";
}

Mat DenseData::as_mat() const {
  Mat m(n, d);
  m.a = v;
  return m;
}

std::size_t SparseData::nnz() const {
  std::size_t t = 0;
  for (const auto& r : rows) t += r.size();
  return t;
}

std::size_t value_records(const Value& v) {
  struct V {
    std::size_t operator()(const TextData& t) const { return t.lines.size(); }
    std::size_t operator()(const TokenData& t) const {
      return t.records.size();
    }
    std::size_t operator()(const DenseData& t) const { return t.n; }
    std::size_t operator()(const SparseData& t) const { return t.n; }
    std::size_t operator()(const ImageData& t) const { return t.count; }
    std::size_t operator()(const ModelData&) const { return 1; }
  };
  return std::visit(V{}, v);
}

std::uint64_t value_bytes(const Value& v) {
  struct V {
    std::uint64_t operator()(const TextData& t) const {
      std::uint64_t b = 0;
      for (const auto& s : t.lines) b += s.size() + 16;
      return b;
    }
    std::uint64_t operator()(const TokenData& t) const {
      std::uint64_t b = 0;
      for (const auto& r : t.records) {
        b += 24;
        for (const auto& s : r) b += s.size() + 16;
      }
      return b;
    }
    std::uint64_t operator()(const DenseData& t) const {
      return static_cast<std::uint64_t>(t.v.size()) * 8;
    }
    std::uint64_t operator()(const SparseData& t) const {
      std::uint64_t b = 0;
      for (const auto& r : t.rows) b += 24 + r.size() * 12;
      return b;
    }
    std::uint64_t operator()(const ImageData& t) const {
      return static_cast<std::uint64_t>(t.v.size()) * 8;
    }
    std::uint64_t operator()(const ModelData& t) const {
      struct M {
        std::uint64_t operator()(const VocabModel& m) const {
          std::uint64_t b = 0;
          for (const auto& s : m.ordered) b += 2 * s.size() + 40;
          return b;
        }
        std::uint64_t operator()(const LinearModel& m) const {
          return static_cast<std::uint64_t>(m.weights.a.size()) * 8;
        }
        std::uint64_t operator()(const PcaModel& m) const {
          return static_cast<std::uint64_t>(m.mean.size() +
                                            m.components.a.size()) *
                 8;
        }
      };
      return std::visit(M{}, t.m);
    }
  };
  return std::visit(V{}, v);
}

namespace {

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  return a.empty() ||
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

bool value_equal(const Value& a, const Value& b) {
  if (a.index() != b.index()) return false;
  if (const auto* t = std::get_if<TextData>(&a))
    return t->lines == std::get<TextData>(b).lines;
  if (const auto* t = std::get_if<TokenData>(&a))
    return t->records == std::get<TokenData>(b).records;
  if (const auto* t = std::get_if<DenseData>(&a)) {
    const auto& u = std::get<DenseData>(b);
    return t->n == u.n && t->d == u.d && bits_equal(t->v, u.v);
  }
  if (const auto* t = std::get_if<SparseData>(&a)) {
    const auto& u = std::get<SparseData>(b);
    return t->n == u.n && t->d == u.d && t->rows == u.rows;
  }
  if (const auto* t = std::get_if<ImageData>(&a)) {
    const auto& u = std::get<ImageData>(b);
    return t->count == u.count && t->height == u.height &&
           t->width == u.width && t->chan == u.chan && bits_equal(t->v, u.v);
  }
  const auto& ma = std::get<ModelData>(a);
  const auto& mb = std::get<ModelData>(b);
  if (ma.m.index() != mb.m.index()) return false;
  if (const auto* m = std::get_if<VocabModel>(&ma.m))
    return m->ordered == std::get<VocabModel>(mb.m).ordered;
  if (const auto* m = std::get_if<LinearModel>(&ma.m))
    return bits_equal(m->weights.a,
                      std::get<LinearModel>(mb.m).weights.a);
  const auto& pa = std::get<PcaModel>(ma.m);
  const auto& pb = std::get<PcaModel>(mb.m);
  return bits_equal(pa.mean, pb.mean) &&
         bits_equal(pa.components.a, pb.components.a);
}

DatasetStats estimate_stats(const Value& v, double full_n) {
  DatasetStats st;
  st.n = full_n;
  const std::size_t rec = value_records(v);
  const double sample_n = rec > 0 ? static_cast<double>(rec) : 1.0;
  st.bytes_per_record = static_cast<double>(value_bytes(v)) / sample_n;
  if (const auto* t = std::get_if<DenseData>(&v)) {
    st.d = static_cast<double>(t->d);
    st.s = static_cast<double>(t->d);
  } else if (const auto* t = std::get_if<SparseData>(&v)) {
    st.d = static_cast<double>(t->d);
    st.s = static_cast<double>(t->nnz()) / sample_n;
  } else if (const auto* t = std::get_if<ImageData>(&v)) {
    st.d = static_cast<double>(t->per_image());
    st.s = st.d;
    st.image_side = static_cast<double>(t->height);
    st.image_chan = static_cast<double>(t->chan);
  } else if (const auto* t = std::get_if<TextData>(&v)) {
    st.d = st.bytes_per_record;
    st.s = st.d;
    (void)t;
  } else if (const auto* t = std::get_if<TokenData>(&v)) {
    double tok = 0;
    for (const auto& r : t->records) tok += static_cast<double>(r.size());
    st.d = tok / sample_n;
    st.s = st.d;
  } else {
    st.n = 1;
    st.d = st.bytes_per_record / kBytesPerScalar;
    st.s = st.d;
  }
  return st;
}

}  // namespace pipeplan
