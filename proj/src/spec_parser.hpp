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

#ifndef PIPEPLAN_SRC_SPEC_PARSER_HPP_
#define PIPEPLAN_SRC_SPEC_PARSER_HPP_

#include <map>
#include <string>
#include <vector>

#include "costmodel.hpp"
#include "graph.hpp"

namespace pipeplan {

// One [data] line: bind a file to a named source node.
struct DataDirective {
  std::string node;
  std::string path;
  std::string format;  // csv | sparse | text
  int line = 0;
};

// A parsed pipeline file.  Sections: [nodes] "name kind key=value ...",
// [edges] "a -> b" (slots in appearance order, or "a -> b:2"), optional
// [cluster] overrides and [data] bindings.  "sink = name" overrides sink
// inference; otherwise the unique node without consumers is the sink.
struct ParsedSpec {
  PipelineGraph graph;
  std::map<std::string, NodeId> ids;  // spec name -> node id
  bool has_cluster = false;
  ClusterResourceDescriptor cluster;
  ImplMultipliers multipliers;
  // Raw [cluster] section body, so callers can re-apply the overrides on
  // top of a descriptor loaded from elsewhere.
  std::string cluster_text;
  std::vector<DataDirective> data;
};

ParsedSpec parse_pipeline_text(const std::string& text,
                               const std::string& origin);
ParsedSpec parse_pipeline_file(const std::string& path);

// Cluster descriptor files: "key = value" lines with keys cpuThroughput,
// memBandwidth, diskBandwidth, netBandwidth, workers, memPerNode, and
// mult.<Impl>.<term> multiplier entries.  Values accept K/M/G suffixes.
void parse_cluster_text(const std::string& text, const std::string& origin,
                        ClusterResourceDescriptor* r, ImplMultipliers* mult);
void load_cluster_file(const std::string& path, ClusterResourceDescriptor* r,
                       ImplMultipliers* mult);

// "250M" -> 2.5e8; accepts plain and scientific numbers, decimal K/M/G/T.
double parse_size(const std::string& s);

}  // namespace pipeplan

#endif  // PIPEPLAN_SRC_SPEC_PARSER_HPP_
