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

#ifndef PIPEPLAN_SRC_IO_HPP_
#define PIPEPLAN_SRC_IO_HPP_

#include <string>

#include "costmodel.hpp"
#include "executor.hpp"
#include "profiler.hpp"
#include "values.hpp"

namespace pipeplan {

// Text records, one per line.  Keeps blank lines so record counts match
// companion label files.
ValuePtr load_text_lines(const std::string& path);

// Comma-separated numeric rows; a first line with any non-numeric cell is
// treated as a header and skipped.  Malformed cells fail with the line
// number.
ValuePtr load_dense_csv(const std::string& path);

// "label idx:val idx:val ..." rows, indices 1-based in the file and
// 0-based in memory.  d is inferred from the largest index unless given.
struct LabeledSparse {
  ValuePtr features;  // SparseData
  ValuePtr labels;    // n x 1 DenseData
};
LabeledSparse load_sparse_text(const std::string& path, std::size_t d = 0);

// Writes a value in its natural text form: text as lines, dense as CSV,
// sparse as "idx:val" rows, images as CSV of flattened rows, models as
// labeled matrix blocks.
void write_value(const Value& v, const std::string& path);
std::string value_to_text(const Value& v);

// Profile snapshot round-trip, "profile v1" text format.
void save_profile(const Profile& p, const std::string& path);
Profile load_profile(const std::string& path);
Profile parse_profile_text(const std::string& text, const std::string& origin);
std::string profile_to_text(const Profile& p);

// Execution trace as a TSV block: one row per node with demand and
// compute counts, predicted and measured seconds, output bytes, and the
// pin flag; a trailing summary row carries wall time and peak store use.
std::string trace_to_tsv(const ExecResult& r);

// Cluster descriptor in the key = value format load_cluster_file reads.
std::string cluster_to_text(const ClusterResourceDescriptor& r,
                            const ImplMultipliers& mult);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace pipeplan

#endif  // PIPEPLAN_SRC_IO_HPP_
