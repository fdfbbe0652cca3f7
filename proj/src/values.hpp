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

#ifndef PIPEPLAN_VALUES_HPP_
#define PIPEPLAN_VALUES_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "common.hpp"
#include "matrix.hpp"

namespace pipeplan {

// Closed set of edge types.  Text covers both raw lines and tokenized
// records; Labels is a dense n x k target block.
enum class TypeTag {
  kText,
  kSparseVec,
  kDenseVec,
  kDenseMatrix,
  kImage,
  kLabels,
  kModel,
};

const char* type_tag_name(TypeTag t);

// ---- record collections -------------------------------------------------

struct TextData {
  std::vector<std::string> lines;
};

struct TokenData {
  std::vector<std::vector<std::string>> records;
};

// n records of d doubles, row-major.  Used for DenseVec, DenseMatrix and
// Labels edges alike.
struct DenseData {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> v;

  double* row(std::size_t i) { return v.data() + i * d; }
  const double* row(std::size_t i) const { return v.data() + i * d; }
  Mat as_mat() const;
};

struct SparseData {
  std::size_t n = 0;
  std::size_t d = 0;
  // Per record: (index, value) pairs with strictly increasing indices.
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows;

  std::size_t nnz() const;
};

// A batch of square images, each height x width with chan channels,
// stored record-major then row-major then channel-last.
struct ImageData {
  std::size_t count = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t chan = 0;
  std::vector<double> v;

  std::size_t per_image() const { return height * width * chan; }
  double* image(std::size_t i) { return v.data() + i * per_image(); }
  const double* image(std::size_t i) const {
    return v.data() + i * per_image();
  }
};

// ---- fitted models ------------------------------------------------------

struct VocabModel {
  // Feature index by gram; indices are dense in [0, size).
  std::map<std::string, std::uint32_t> index;
  std::vector<std::string> ordered;  // gram at each index
};

struct LinearModel {
  Mat weights;  // d x k
};

struct PcaModel {
  std::vector<double> mean;  // d
  Mat components;            // d x k, orthonormal columns
};

struct ModelData {
  std::variant<VocabModel, LinearModel, PcaModel> m;
};

using Value =
    std::variant<TextData, TokenData, DenseData, SparseData, ImageData,
                 ModelData>;
using ValuePtr = std::shared_ptr<const Value>;

// Number of records a value carries (models count as 1).
std::size_t value_records(const Value& v);
// In-memory footprint estimate in bytes, used for cache accounting.
std::uint64_t value_bytes(const Value& v);
// Byte-exact equality (used to assert result invariance across policies).
bool value_equal(const Value& a, const Value& b);

// ---- dataset statistics -------------------------------------------------

// Summary a cost formula consumes: n examples, d features, k targets,
// s non-zeros per example, and bytes per example.  Image inputs also carry
// their geometry so convolution costs can be formed.
struct DatasetStats {
  double n = 0;
  double d = 0;
  double k = 1;
  double s = 0;  // avg non-zeros per record; equals d when dense
  double bytes_per_record = 0;
  double image_side = 0;
  double image_chan = 0;
};

// Stats of a value scaled to full_n records (profiling runs on samples).
DatasetStats estimate_stats(const Value& v, double full_n);

}  // namespace pipeplan

#endif  // PIPEPLAN_VALUES_HPP_
