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

#include "io.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <variant>

namespace pipeplan {
namespace {

// Shortest decimal form that parses back to the same double.
std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

bool parse_double(const std::string& s, double* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return false;
  *out = v;
  return true;
}

[[noreturn]] void fail_at(const std::string& origin, std::size_t line,
                          const std::string& msg) {
  std::ostringstream os;
  os << origin << ":" << line << ": " << msg;
  throw Error(ErrorCode::kParse, os.str());
}

std::vector<std::string> read_lines(const std::string& path) {
  std::string text = read_text_file(path);
  std::vector<std::string> lines;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur)) {
    if (!cur.empty() && cur.back() == '\r') cur.pop_back();
    lines.push_back(cur);
  }
  return lines;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open " + path);
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::kIo, "cannot write " + path);
  }
  out << content;
  out.flush();
  if (!out) {
    throw Error(ErrorCode::kIo, "short write to " + path);
  }
}

ValuePtr load_text_lines(const std::string& path) {
  TextData t;
  t.lines = read_lines(path);
  return std::make_shared<const Value>(std::move(t));
}

ValuePtr load_dense_csv(const std::string& path) {
  std::vector<std::string> lines = read_lines(path);
  DenseData m;
  bool checked_header = false;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::string& line = lines[li];
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    bool ok = true;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      std::size_t end = comma == std::string::npos ? line.size() : comma;
      std::string cell = line.substr(pos, end - pos);
      std::size_t a = cell.find_first_not_of(" \t");
      std::size_t b = cell.find_last_not_of(" \t");
      cell = a == std::string::npos ? "" : cell.substr(a, b - a + 1);
      double v = 0;
      if (!parse_double(cell, &v)) {
        ok = false;
        break;
      }
      row.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!ok) {
      // Only the first content line may be non-numeric (a header).
      if (!checked_header) {
        checked_header = true;
        continue;
      }
      fail_at(path, li + 1, "malformed numeric cell");
    }
    checked_header = true;
    if (m.n == 0) {
      m.d = row.size();
    } else if (row.size() != m.d) {
      std::ostringstream os;
      os << "expected " << m.d << " columns, got " << row.size();
      fail_at(path, li + 1, os.str());
    }
    ++m.n;
    m.v.insert(m.v.end(), row.begin(), row.end());
  }
  return std::make_shared<const Value>(std::move(m));
}

LabeledSparse load_sparse_text(const std::string& path, std::size_t d) {
  std::vector<std::string> lines = read_lines(path);
  SparseData feat;
  DenseData labels;
  labels.d = 1;
  std::size_t max_index = 0;  // 1-based
  for (std::size_t li = 0; li < lines.size(); ++li) {
    std::vector<std::string> toks = split_ws(lines[li]);
    if (toks.empty()) continue;
    double label = 0;
    if (!parse_double(toks[0], &label)) {
      fail_at(path, li + 1, "expected a numeric label, got '" + toks[0] + "'");
    }
    std::vector<std::pair<std::uint32_t, double>> row;
    for (std::size_t i = 1; i < toks.size(); ++i) {
      std::size_t colon = toks[i].find(':');
      if (colon == std::string::npos || colon == 0 ||
          colon + 1 == toks[i].size()) {
        fail_at(path, li + 1, "expected idx:val, got '" + toks[i] + "'");
      }
      char* end = nullptr;
      const std::string idx_s = toks[i].substr(0, colon);
      unsigned long idx = std::strtoul(idx_s.c_str(), &end, 10);
      if (end != idx_s.c_str() + idx_s.size() || idx == 0) {
        fail_at(path, li + 1, "feature indices are 1-based integers");
      }
      double v = 0;
      if (!parse_double(toks[i].substr(colon + 1), &v)) {
        fail_at(path, li + 1, "malformed value in '" + toks[i] + "'");
      }
      if (d != 0 && idx > d) {
        std::ostringstream os;
        os << "index " << idx << " exceeds dimension " << d;
        fail_at(path, li + 1, os.str());
      }
      max_index = std::max(max_index, static_cast<std::size_t>(idx));
      row.push_back({static_cast<std::uint32_t>(idx - 1), v});
    }
    std::sort(row.begin(), row.end());
    for (std::size_t i = 1; i < row.size(); ++i) {
      if (row[i].first == row[i - 1].first) {
        fail_at(path, li + 1, "duplicate feature index");
      }
    }
    feat.rows.push_back(std::move(row));
    labels.v.push_back(label);
  }
  feat.n = feat.rows.size();
  feat.d = d != 0 ? d : max_index;
  labels.n = labels.v.size();
  LabeledSparse out;
  out.features = std::make_shared<const Value>(std::move(feat));
  out.labels = std::make_shared<const Value>(std::move(labels));
  return out;
}

namespace {

void append_csv_row(std::ostringstream& os, const double* v, std::size_t d) {
  for (std::size_t j = 0; j < d; ++j) {
    if (j != 0) os << ",";
    os << fmt(v[j]);
  }
  os << "\n";
}

struct ValueWriter {
  std::ostringstream os;

  void operator()(const TextData& t) {
    for (const std::string& line : t.lines) os << line << "\n";
  }
  void operator()(const TokenData& t) {
    for (const auto& rec : t.records) {
      for (std::size_t i = 0; i < rec.size(); ++i) {
        if (i != 0) os << " ";
        os << rec[i];
      }
      os << "\n";
    }
  }
  void operator()(const DenseData& m) {
    for (std::size_t i = 0; i < m.n; ++i) append_csv_row(os, m.row(i), m.d);
  }
  void operator()(const SparseData& s) {
    for (const auto& row : s.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i != 0) os << " ";
        os << (row[i].first + 1) << ":" << fmt(row[i].second);
      }
      os << "\n";
    }
  }
  void operator()(const ImageData& im) {
    for (std::size_t i = 0; i < im.count; ++i) {
      append_csv_row(os, im.image(i), im.per_image());
    }
  }
  void operator()(const ModelData& md) {
    if (const auto* vm = std::get_if<VocabModel>(&md.m)) {
      os << "vocab " << vm->ordered.size() << "\n";
      for (std::size_t i = 0; i < vm->ordered.size(); ++i) {
        os << i << "\t" << vm->ordered[i] << "\n";
      }
    } else if (const auto* lm = std::get_if<LinearModel>(&md.m)) {
      os << "linear " << lm->weights.rows << " " << lm->weights.cols << "\n";
      for (std::size_t i = 0; i < lm->weights.rows; ++i) {
        append_csv_row(os, lm->weights.row(i), lm->weights.cols);
      }
    } else if (const auto* pm = std::get_if<PcaModel>(&md.m)) {
      os << "pca " << pm->components.rows << " " << pm->components.cols
         << "\n";
      os << "mean\n";
      append_csv_row(os, pm->mean.data(), pm->mean.size());
      os << "components\n";
      for (std::size_t i = 0; i < pm->components.rows; ++i) {
        append_csv_row(os, pm->components.row(i), pm->components.cols);
      }
    }
  }
};

}  // namespace

std::string value_to_text(const Value& v) {
  ValueWriter w;
  std::visit(w, v);
  return w.os.str();
}

void write_value(const Value& v, const std::string& path) {
  write_text_file(path, value_to_text(v));
}

std::string profile_to_text(const Profile& p) {
  std::ostringstream os;
  os << "profile v1\n";
  os << "scale " << fmt(p.scale_records) << "\n";
  os << "sink " << p.sink << "\n";
  for (const ProfileNode& n : p.nodes) {
    os << "node " << n.id << " " << n.kind << " "
       << (n.impl.empty() ? "-" : n.impl) << " " << n.role << " " << n.weight
       << " " << fmt(n.t_sec) << " " << fmt(n.out_bytes) << " "
       << fmt(n.stats.n) << " " << fmt(n.stats.d) << " " << fmt(n.stats.k)
       << " " << fmt(n.stats.s) << " " << fmt(n.stats.bytes_per_record) << " "
       << fmt(n.stats.image_side) << " " << fmt(n.stats.image_chan) << " "
       << n.name << "\n";
  }
  for (const GraphEdge& e : p.edges) {
    os << "edge " << e.from << " " << e.to << " " << e.slot << "\n";
  }
  return os.str();
}

Profile parse_profile_text(const std::string& text,
                           const std::string& origin) {
  std::istringstream is(text);
  std::string line;
  std::size_t li = 0;
  Profile p;
  bool saw_header = false;
  while (std::getline(is, line)) {
    ++li;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> toks = split_ws(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    if (!saw_header) {
      if (toks.size() != 2 || toks[0] != "profile" || toks[1] != "v1") {
        fail_at(origin, li, "not a profile file (expected 'profile v1')");
      }
      saw_header = true;
      continue;
    }
    double num = 0;
    if (toks[0] == "scale" && toks.size() == 2) {
      if (!parse_double(toks[1], &num)) fail_at(origin, li, "bad scale");
      p.scale_records = num;
    } else if (toks[0] == "sink" && toks.size() == 2) {
      if (!parse_double(toks[1], &num)) fail_at(origin, li, "bad sink id");
      p.sink = static_cast<NodeId>(num);
    } else if (toks[0] == "node") {
      if (toks.size() < 16) {
        fail_at(origin, li, "node line needs 15 fields");
      }
      ProfileNode n;
      double f[14];
      // Fields 5..14 are numeric; 2..4 are tokens.
      static const int numeric[] = {1, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14};
      for (int i = 0; i < 11; ++i) {
        if (!parse_double(toks[numeric[i]], &f[i])) {
          fail_at(origin, li, "malformed number '" + toks[numeric[i]] + "'");
        }
      }
      n.id = static_cast<NodeId>(f[0]);
      n.kind = toks[2];
      n.impl = toks[3] == "-" ? "" : toks[3];
      if (toks[4].size() != 1 ||
          (toks[4][0] != 'S' && toks[4][0] != 'T' && toks[4][0] != 'E')) {
        fail_at(origin, li, "role must be S, T or E");
      }
      n.role = toks[4][0];
      n.weight = static_cast<int>(f[1]);
      n.t_sec = f[2];
      n.out_bytes = f[3];
      n.stats.n = f[4];
      n.stats.d = f[5];
      n.stats.k = f[6];
      n.stats.s = f[7];
      n.stats.bytes_per_record = f[8];
      n.stats.image_side = f[9];
      n.stats.image_chan = f[10];
      std::string name = toks[15];
      for (std::size_t i = 16; i < toks.size(); ++i) name += " " + toks[i];
      n.name = name;
      p.nodes.push_back(std::move(n));
    } else if (toks[0] == "edge") {
      if (toks.size() != 4) fail_at(origin, li, "edge line needs 3 fields");
      double a = 0, b = 0, c = 0;
      if (!parse_double(toks[1], &a) || !parse_double(toks[2], &b) ||
          !parse_double(toks[3], &c)) {
        fail_at(origin, li, "malformed edge");
      }
      p.edges.push_back({static_cast<NodeId>(a), static_cast<NodeId>(b),
                         static_cast<int>(c)});
    } else {
      fail_at(origin, li, "unknown directive '" + toks[0] + "'");
    }
  }
  if (!saw_header) {
    throw Error(ErrorCode::kParse,
                origin + ": not a profile file (expected 'profile v1')");
  }
  p.validate();
  return p;
}

void save_profile(const Profile& p, const std::string& path) {
  write_text_file(path, profile_to_text(p));
}

Profile load_profile(const std::string& path) {
  return parse_profile_text(read_text_file(path), path);
}

std::string trace_to_tsv(const ExecResult& r) {
  std::ostringstream os;
  os << "node\tname\tdemands\tcomputes\tpredicted_sec\tmeasured_sec\tbytes"
     << "\tpinned\n";
  for (const NodeTraceEntry& e : r.trace) {
    os << e.id << "\t" << e.name << "\t" << e.demands << "\t" << e.computes
       << "\t" << fmt(e.predicted_sec) << "\t" << fmt(e.measured_sec) << "\t"
       << e.bytes << "\t" << (e.pinned ? 1 : 0) << "\n";
  }
  os << "# wall_sec=" << fmt(r.wall_sec)
     << "\tpeak_cache_bytes=" << fmt(r.peak_cache_bytes)
     << "\tfallback=" << (r.fallback_triggered ? 1 : 0) << "\n";
  return os.str();
}

std::string cluster_to_text(const ClusterResourceDescriptor& r,
                            const ImplMultipliers& mult) {
  std::ostringstream os;
  os << "workers = " << r.workers << "\n";
  os << "cpuThroughput = " << fmt(r.cpu_throughput) << "\n";
  os << "memBandwidth = " << fmt(r.mem_bandwidth) << "\n";
  os << "diskBandwidth = " << fmt(r.disk_bandwidth) << "\n";
  os << "netBandwidth = " << fmt(r.net_bandwidth) << "\n";
  os << "memPerNode = " << fmt(r.mem_per_node) << "\n";
  for (const auto& [key, v] : mult.raw()) {
    os << "mult." << key << " = " << fmt(v) << "\n";
  }
  return os.str();
}

}  // namespace pipeplan
