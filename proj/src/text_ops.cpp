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

#include "text_ops.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "common.hpp"

namespace pipeplan {

std::vector<std::string> tokenize_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    const unsigned char u = static_cast<unsigned char>(ch);
    char c = ch;
    if (u >= 'A' && u <= 'Z') c = static_cast<char>(u - 'A' + 'a');
    const bool alnum = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
    if (alnum) {
      cur.push_back(c);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::vector<std::string> make_ngrams(const std::vector<std::string>& tokens,
                                     std::size_t n) {
  check(n >= 1, ErrorCode::kInvalidArgument, "ngram width must be >= 1");
  std::vector<std::string> out;
  if (tokens.size() < n) return out;
  out.reserve(tokens.size() - n + 1);
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string g = tokens[i];
    for (std::size_t j = 1; j < n; ++j) {
      g.push_back(' ');
      g += tokens[i + j];
    }
    out.push_back(std::move(g));
  }
  return out;
}

VocabModel top_k_features(const TokenData& corpus, std::size_t k) {
  check(k >= 1, ErrorCode::kInvalidArgument, "feature count must be >= 1");
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& rec : corpus.records) {
    for (const auto& g : rec) ++counts[g];
  }
  check(!counts.empty(), ErrorCode::kExecution,
        "cannot build a vocabulary from an empty corpus");
  std::vector<std::pair<std::string, std::uint64_t>> ranked(counts.begin(),
                                                            counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > k) ranked.resize(k);
  VocabModel vocab;
  vocab.ordered.reserve(ranked.size());
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    vocab.ordered.push_back(ranked[i].first);
    vocab.index[ranked[i].first] = i;
  }
  return vocab;
}

SparseData term_frequency(const TokenData& corpus, const VocabModel& vocab) {
  check(!vocab.ordered.empty(), ErrorCode::kExecution,
        "term frequency needs a non-empty vocabulary");
  SparseData out;
  out.n = corpus.records.size();
  out.d = vocab.ordered.size();
  out.rows.resize(out.n);
  for (std::size_t r = 0; r < out.n; ++r) {
    std::map<std::size_t, double> row;  // ordered, so indices come out increasing
    for (const auto& g : corpus.records[r]) {
      auto it = vocab.index.find(g);
      if (it != vocab.index.end()) row[it->second] += 1.0;
    }
    out.rows[r].assign(row.begin(), row.end());
  }
  return out;
}

}  // namespace pipeplan
