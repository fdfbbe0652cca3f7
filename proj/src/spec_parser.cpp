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

#include "spec_parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "common.hpp"

namespace pipeplan {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a])) != 0) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])) != 0) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] void parse_fail(const std::string& origin, int line,
                             const std::string& msg) {
  fail(ErrorCode::kParse,
       origin + ":" + std::to_string(line) + ": " + msg);
}

struct RawNode {
  std::string name;
  OpKind kind;
  Params params;
  int line = 0;
};

struct RawEdge {
  std::string from, to;
  int slot = -1;  // -1: next free slot on `to`
  int line = 0;
};

}  // namespace

double parse_size(const std::string& s) {
  const std::string t = trim(s);
  check(!t.empty(), ErrorCode::kParse, "empty size value");
  double mult = 1.0;
  std::string num = t;
  const char suffix = static_cast<char>(
      std::toupper(static_cast<unsigned char>(t.back())));
  if (suffix == 'K' || suffix == 'M' || suffix == 'G' || suffix == 'T') {
    mult = suffix == 'K' ? 1e3 : suffix == 'M' ? 1e6 : suffix == 'G' ? 1e9
                                                                     : 1e12;
    num = t.substr(0, t.size() - 1);
  }
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(num, &used);
  } catch (const std::exception&) {
    fail(ErrorCode::kParse, "bad size value '" + s + "'");
  }
  check(used == num.size(), ErrorCode::kParse, "bad size value '" + s + "'");
  return v * mult;
}

void parse_cluster_text(const std::string& text, const std::string& origin,
                        ClusterResourceDescriptor* r, ImplMultipliers* mult) {
  std::istringstream is(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      parse_fail(origin, lineno, "expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    double num = 0;
    try {
      num = parse_size(val);
    } catch (const Error& e) {
      parse_fail(origin, lineno, e.what());
    }
    if (key == "cpuThroughput") {
      r->cpu_throughput = num;
    } else if (key == "memBandwidth") {
      r->mem_bandwidth = num;
    } else if (key == "diskBandwidth") {
      r->disk_bandwidth = num;
    } else if (key == "netBandwidth") {
      r->net_bandwidth = num;
    } else if (key == "workers") {
      r->workers = num;
    } else if (key == "memPerNode") {
      r->mem_per_node = num;
    } else if (key.rfind("mult.", 0) == 0) {
      const std::string rest = key.substr(5);
      const std::size_t dot = rest.find('.');
      if (dot == std::string::npos || dot == 0 || dot + 1 == rest.size()) {
        parse_fail(origin, lineno,
                   "multiplier keys look like mult.<Impl>.<term>");
      }
      if (mult != nullptr) {
        mult->set(rest.substr(0, dot), rest.substr(dot + 1), num);
      }
    } else {
      parse_fail(origin, lineno, "unknown cluster key '" + key + "'");
    }
  }
}

void load_cluster_file(const std::string& path, ClusterResourceDescriptor* r,
                       ImplMultipliers* mult) {
  std::ifstream in(path);
  check(in.good(), ErrorCode::kIo, "cannot open cluster file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  parse_cluster_text(buf.str(), path, r, mult);
}

ParsedSpec parse_pipeline_text(const std::string& text,
                               const std::string& origin) {
  std::vector<RawNode> nodes;
  std::vector<RawEdge> edges;
  ParsedSpec out;
  std::string sink_name;
  int sink_line = 0;

  enum class Section { kNone, kCluster, kNodes, kEdges, kData };
  Section section = Section::kNone;
  std::string cluster_text;
  int cluster_first_line = 0;

  std::istringstream is(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line == "[cluster]") {
        section = Section::kCluster;
        if (cluster_first_line == 0) cluster_first_line = lineno + 1;
      } else if (line == "[nodes]") {
        section = Section::kNodes;
      } else if (line == "[edges]") {
        section = Section::kEdges;
      } else if (line == "[data]") {
        section = Section::kData;
      } else {
        parse_fail(origin, lineno, "unknown section " + line);
      }
      continue;
    }
    if (line.rfind("sink", 0) == 0 && section != Section::kData &&
        section != Section::kCluster) {
      const std::string rest = trim(line.substr(4));
      if (!rest.empty() && rest.front() == '=') {
        sink_name = trim(rest.substr(1));
        if (sink_name.empty()) {
          parse_fail(origin, lineno, "expected sink = <name>");
        }
        sink_line = lineno;
        continue;
      }
    }
    switch (section) {
      case Section::kNone:
        parse_fail(origin, lineno, "content before any section header");
      case Section::kCluster:
        cluster_text += line;
        cluster_text.push_back('\n');
        out.has_cluster = true;
        break;
      case Section::kNodes: {
        const auto toks = split_ws(line);
        if (toks.size() < 2) {
          parse_fail(origin, lineno, "node lines are: name kind key=value...");
        }
        RawNode n;
        n.name = toks[0];
        n.line = lineno;
        if (!parse_op_kind(toks[1], &n.kind)) {
          parse_fail(origin, lineno, "unknown operator kind '" + toks[1] + "'");
        }
        std::string kv;
        for (std::size_t i = 2; i < toks.size(); ++i) {
          if (toks[i].find('=') == std::string::npos) {
            parse_fail(origin, lineno,
                       "node parameter '" + toks[i] + "' is not key=value");
          }
          kv += toks[i];
          kv.push_back(' ');
        }
        n.params = Params::parse_kv(kv);
        for (const RawNode& prev : nodes) {
          if (prev.name == n.name) {
            parse_fail(origin, lineno, "duplicate node name '" + n.name + "'");
          }
        }
        nodes.push_back(std::move(n));
        break;
      }
      case Section::kEdges: {
        const std::size_t arrow = line.find("->");
        if (arrow == std::string::npos) {
          parse_fail(origin, lineno, "edge lines are: from -> to[:slot]");
        }
        RawEdge e;
        e.from = trim(line.substr(0, arrow));
        std::string to = trim(line.substr(arrow + 2));
        const std::size_t colon = to.find(':');
        if (colon != std::string::npos) {
          try {
            e.slot = std::stoi(to.substr(colon + 1));
          } catch (const std::exception&) {
            parse_fail(origin, lineno, "bad slot in '" + to + "'");
          }
          to = trim(to.substr(0, colon));
        }
        e.to = to;
        e.line = lineno;
        if (e.from.empty() || e.to.empty()) {
          parse_fail(origin, lineno, "edge lines are: from -> to[:slot]");
        }
        edges.push_back(std::move(e));
        break;
      }
      case Section::kData: {
        const auto toks = split_ws(line);
        if (toks.size() < 2) {
          parse_fail(origin, lineno, "data lines are: node path=... format=...");
        }
        DataDirective d;
        d.node = toks[0];
        d.line = lineno;
        for (std::size_t i = 1; i < toks.size(); ++i) {
          const std::size_t eq = toks[i].find('=');
          if (eq == std::string::npos) {
            parse_fail(origin, lineno,
                       "data parameter '" + toks[i] + "' is not key=value");
          }
          const std::string key = toks[i].substr(0, eq);
          const std::string val = toks[i].substr(eq + 1);
          if (key == "path") {
            d.path = val;
          } else if (key == "format") {
            d.format = val;
          } else {
            parse_fail(origin, lineno, "unknown data key '" + key + "'");
          }
        }
        if (d.path.empty()) {
          parse_fail(origin, lineno, "data line without path=");
        }
        if (d.format.empty()) d.format = "csv";
        out.data.push_back(std::move(d));
        break;
      }
    }
  }

  out.cluster_text = cluster_text;
  if (out.has_cluster) {
    try {
      parse_cluster_text(cluster_text, origin, &out.cluster,
                         &out.multipliers);
    } catch (const Error& e) {
      // Re-anchor: the embedded section's own numbering is meaningless.
      fail(ErrorCode::kParse, std::string(e.what()) +
                                  " (inside [cluster] section)");
    }
  }
  if (nodes.empty()) {
    fail(ErrorCode::kParse, origin + ": no [nodes] section");
  }

  std::vector<LogicalNode> gnodes;
  for (const RawNode& rn : nodes) {
    LogicalNode n;
    n.id = PipelineGraph::next_id();
    n.name = rn.name;
    n.kind = rn.kind;
    n.params = rn.params;
    out.ids[rn.name] = n.id;
    gnodes.push_back(std::move(n));
  }
  std::vector<GraphEdge> gedges;
  std::map<NodeId, int> next_slot;
  for (const RawEdge& re : edges) {
    const auto from = out.ids.find(re.from);
    if (from == out.ids.end()) {
      parse_fail(origin, re.line, "edge names unknown node '" + re.from + "'");
    }
    const auto to = out.ids.find(re.to);
    if (to == out.ids.end()) {
      parse_fail(origin, re.line, "edge names unknown node '" + re.to + "'");
    }
    GraphEdge e;
    e.from = from->second;
    e.to = to->second;
    e.slot = re.slot >= 0 ? re.slot : next_slot[to->second];
    next_slot[to->second] =
        std::max(next_slot[to->second], e.slot + 1);
    gedges.push_back(e);
  }

  NodeId sink = 0;
  if (!sink_name.empty()) {
    const auto it = out.ids.find(sink_name);
    if (it == out.ids.end()) {
      parse_fail(origin, sink_line, "sink names unknown node '" + sink_name +
                                        "'");
    }
    sink = it->second;
  } else {
    std::vector<std::string> leaves;
    for (const RawNode& rn : nodes) {
      const NodeId id = out.ids[rn.name];
      const bool consumed =
          std::any_of(gedges.begin(), gedges.end(),
                      [&](const GraphEdge& e) { return e.from == id; });
      if (!consumed) {
        leaves.push_back(rn.name);
        sink = id;
      }
    }
    if (leaves.size() != 1) {
      std::string names;
      for (const auto& l : leaves) names += " " + l;
      fail(ErrorCode::kParse,
           origin + ": sink is ambiguous; nodes without consumers:" + names +
               " (add sink = <name>)");
    }
  }

  out.graph = PipelineGraph::from_parts(std::move(gnodes), std::move(gedges),
                                        sink);
  return out;
}

ParsedSpec parse_pipeline_file(const std::string& path) {
  std::ifstream in(path);
  check(in.good(), ErrorCode::kIo, "cannot open pipeline file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_pipeline_text(buf.str(), path);
}

}  // namespace pipeplan
