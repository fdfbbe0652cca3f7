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

#ifndef PIPEPLAN_TEXT_OPS_HPP_
#define PIPEPLAN_TEXT_OPS_HPP_

#include <string>
#include <vector>

#include "values.hpp"

namespace pipeplan {

// Lowercases ASCII letters and splits on every non-alphanumeric byte.
std::vector<std::string> tokenize_line(const std::string& line);

// Sliding n-token windows joined with single spaces.  Records shorter
// than n produce no grams.
std::vector<std::string> make_ngrams(const std::vector<std::string>& tokens,
                                     std::size_t n);

// Most frequent k grams over the whole corpus.  Ties break toward the
// lexicographically smaller gram; index order follows that ranking.
VocabModel top_k_features(const TokenData& corpus, std::size_t k);

// Per-record occurrence counts over the vocabulary, sparse rows with
// strictly increasing feature indices.
SparseData term_frequency(const TokenData& corpus, const VocabModel& vocab);

}  // namespace pipeplan

#endif  // PIPEPLAN_TEXT_OPS_HPP_
