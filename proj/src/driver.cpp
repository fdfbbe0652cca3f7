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

#include "driver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "calibrate.hpp"
#include "io.hpp"
#include "rng.hpp"

namespace pipeplan {
namespace {

std::string fmt_sec(double v) {
  std::ostringstream os;
  os << std::setprecision(5) << v;
  return os.str();
}

std::string fmt_bytes(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

bool planned_policy(CachePolicy p) {
  return p == CachePolicy::kGreedy || p == CachePolicy::kRule ||
         p == CachePolicy::kOptimal;
}

std::set<NodeId> pinned_for(const Profile& p, CachePolicy policy,
                            double budget, std::vector<GreedyPick>* picks) {
  switch (policy) {
    case CachePolicy::kGreedy:
      return plan_greedy(p, budget, picks);
    case CachePolicy::kRule:
      return plan_rule(p, budget);
    case CachePolicy::kOptimal:
      return plan_optimal(p, budget);
    default:
      return {};
  }
}

// Savings of each cached node relative to dropping it from the set, for
// policies that do not come with a selection history.
std::vector<GreedyPick> removal_marginals(const Profile& p,
                                          const std::set<NodeId>& cached) {
  std::vector<GreedyPick> out;
  const double base = est_runtime(p, cached);
  for (NodeId id : cached) {
    std::set<NodeId> rest = cached;
    rest.erase(id);
    out.push_back({id, est_runtime(p, rest) - base, p.node(id).out_bytes});
  }
  return out;
}

ValuePtr load_bound_value(const DataDirective& d) {
  if (d.format == "csv") return load_dense_csv(d.path);
  if (d.format == "text") return load_text_lines(d.path);
  if (d.format == "sparse") return load_sparse_text(d.path).features;
  if (d.format == "sparse-labels") return load_sparse_text(d.path).labels;
  fail(ErrorCode::kParse, "unknown data format '" + d.format + "' for node " +
                              d.node +
                              " (use csv, sparse, sparse-labels or text)");
}

bool optimizable_node(const LogicalNode& n) {
  if (n.kind == OpKind::kConvolution) return true;
  return (n.kind == OpKind::kLinearSolver || n.kind == OpKind::kPca) &&
         n.role == Role::kEstimator;
}

}  // namespace

Profile align_profile(const Profile& p, const PipelineGraph& g) {
  std::map<std::string, NodeId> by_name;
  for (const LogicalNode& n : g.nodes()) {
    check(by_name.emplace(n.name, n.id).second, ErrorCode::kInvalidArgument,
          "cannot align a profile: duplicate node name '" + n.name + "'");
  }
  std::map<NodeId, NodeId> to_graph;
  Profile out = p;
  for (ProfileNode& n : out.nodes) {
    auto it = by_name.find(n.name);
    check(it != by_name.end(), ErrorCode::kInvalidArgument,
          "profile does not match the pipeline: no node named '" + n.name +
              "' (was it saved at a different opt level?)");
    OpKind kind = OpKind::kDataSource;
    check(parse_op_kind(n.kind, &kind) && g.node(it->second).kind == kind,
          ErrorCode::kInvalidArgument,
          "profile does not match the pipeline: node '" + n.name +
              "' changed kind");
    to_graph[n.id] = it->second;
    n.id = it->second;
  }
  check(to_graph.size() == g.node_count(), ErrorCode::kInvalidArgument,
        "profile does not match the pipeline: node counts differ");
  for (GraphEdge& e : out.edges) {
    e.from = to_graph.at(e.from);
    e.to = to_graph.at(e.to);
  }
  out.sink = to_graph.at(p.sink);
  std::sort(out.nodes.begin(), out.nodes.end(),
            [](const ProfileNode& a, const ProfileNode& b) {
              return a.id < b.id;
            });
  out.validate();
  return out;
}

PreparedPipeline prepare_pipeline(const RunConfig& cfg) {
  check(!cfg.spec_path.empty(), ErrorCode::kInvalidArgument,
        "no pipeline file given");
  const double t0 = now_sec();
  PreparedPipeline out;
  if (!cfg.cluster_path.empty()) {
    load_cluster_file(cfg.cluster_path, &out.cluster, &out.mult);
  }
  ParsedSpec ps = parse_pipeline_file(cfg.spec_path);
  if (ps.has_cluster) {
    // Inline overrides layer on top of the descriptor file.
    parse_cluster_text(ps.cluster_text, cfg.spec_path + " [cluster]",
                       &out.cluster, &out.mult);
  }

  out.graph = ps.graph;
  for (const LogicalNode& n : ps.graph.nodes()) out.remap[n.id] = n.id;
  if (cfg.opt_level >= 1) {
    std::map<NodeId, NodeId> remap;
    out.graph = merge_common_subexpressions(ps.graph, &remap);
    out.remap = remap;
    for (const auto& [old_id, kept] : remap) {
      if (old_id != kept) {
        out.merges.push_back(
            {ps.graph.node(old_id).name, out.graph.node(kept).name});
      }
    }
  }

  // Relative [data] paths resolve against the pipeline file's directory.
  std::string spec_dir;
  if (std::size_t slash = cfg.spec_path.find_last_of('/');
      slash != std::string::npos) {
    spec_dir = cfg.spec_path.substr(0, slash + 1);
  }
  for (DataDirective d : ps.data) {
    auto it = ps.ids.find(d.node);
    check(it != ps.ids.end(), ErrorCode::kParse,
          "[data] names unknown node '" + d.node + "'");
    if (!spec_dir.empty() && !d.path.empty() && d.path[0] != '/') {
      d.path = spec_dir + d.path;
    }
    out.bindings.by_node[out.remap.at(it->second)] = load_bound_value(d);
  }

  out.plan = default_plan(out.graph);
  OpContext ctx;
  ctx.cluster = &out.cluster;
  ctx.bindings = &out.bindings;
  ctx.threads = cfg.threads;
  ctx.seed = cfg.seed;
  ProfileOptions popts;
  popts.reps = cfg.profile_reps;

  const bool measured_here = cfg.profile_in.empty();
  if (measured_here) {
    out.profile = profile_pipeline(out.graph, out.plan, ctx, popts);
  } else {
    out.profile = align_profile(load_profile(cfg.profile_in), out.graph);
    // The saved profile fixes the physical plan it was measured under.
    for (const ProfileNode& n : out.profile.nodes) {
      out.plan[n.id] = {n.impl, n.weight};
    }
  }

  if (cfg.opt_level >= 2 && measured_here) {
    bool changed = false;
    for (const LogicalNode& n : out.graph.nodes()) {
      if (!optimizable_node(n)) continue;
      const std::vector<NodeId>& ins = out.graph.inputs(n.id);
      check(!ins.empty(), ErrorCode::kInternal,
            "optimizable node without inputs");
      PhysicalChoice c = choose_physical(n, out.profile.node(ins[0]).stats,
                                         out.cluster, out.mult);
      out.choices.push_back({n.id, c});
      NodePlan& np = out.plan[n.id];
      if (np.impl != c.impl || np.weight != c.effective_w) {
        np.impl = c.impl;
        np.weight = c.effective_w;
        changed = true;
      }
    }
    if (changed) {
      // Timings were taken under the default routes; measure the chosen
      // ones so downstream planning sees their real costs.
      out.profile = profile_pipeline(out.graph, out.plan, ctx, popts);
    }
  }

  // Level 0 runs the pipeline as written: no planned pinning (admission
  // caching stays available when asked for explicitly).
  if (cfg.opt_level >= 1) {
    out.pinned =
        pinned_for(out.profile, cfg.policy, cfg.budget_bytes, &out.picks);
  }
  if (cfg.policy == CachePolicy::kLru) {
    out.predicted_sec =
        simulate_lru(out.profile, cfg.budget_bytes, cfg.admission_fraction)
            .time_sec;
  } else {
    out.predicted_sec = est_runtime(out.profile, out.pinned);
  }
  if (!cfg.profile_out.empty()) save_profile(out.profile, cfg.profile_out);
  out.planning_sec = now_sec() - t0;
  return out;
}

namespace {

void explain_text(const RunConfig& cfg, const PreparedPipeline& prep,
                  std::ostringstream& os) {
  os << "pipeline: " << cfg.spec_path << "\n";
  os << "nodes: " << prep.graph.node_count();
  if (!prep.merges.empty()) os << " (" << prep.merges.size() << " merged)";
  os << "\n";
  os << "opt level: " << cfg.opt_level << "\n\n";

  os << "merged subexpressions:\n";
  if (prep.merges.empty()) {
    os << "  none\n";
  } else {
    for (const auto& [dropped, kept] : prep.merges) {
      os << "  " << dropped << " -> " << kept << "\n";
    }
  }
  os << "\n";

  os << "operator choices:\n";
  if (prep.choices.empty()) {
    os << "  none\n";
  } else {
    for (const auto& [id, c] : prep.choices) {
      os << "  " << prep.graph.node(id).name << ": " << c.impl << ", "
         << fmt_sec(c.combined) << "s estimated\n";
      os << "    candidates:";
      for (const auto& [impl, sec, feasible] : c.candidates) {
        os << " " << impl << "=" << fmt_sec(sec);
        if (!feasible) os << "(infeasible)";
      }
      os << "\n";
    }
  }
  os << "\n";

  os << "cache plan: policy " << cache_policy_name(cfg.policy) << ", budget "
     << fmt_bytes(cfg.budget_bytes) << " bytes\n";
  if (cfg.policy == CachePolicy::kLru) {
    os << "  admission-managed at runtime; no planned set\n";
  } else if (prep.pinned.empty()) {
    os << "  none\n";
  } else {
    std::vector<GreedyPick> rows = prep.picks.empty()
                                       ? removal_marginals(prep.profile,
                                                           prep.pinned)
                                       : prep.picks;
    for (const GreedyPick& pk : rows) {
      os << "  " << prep.graph.node(pk.id).name
         << "  bytes=" << fmt_bytes(pk.bytes)
         << "  saves=" << fmt_sec(pk.saved_sec) << "s\n";
    }
    os << "  total: " << prep.pinned.size() << " nodes, "
       << fmt_bytes(cache_bytes(prep.profile, prep.pinned)) << " bytes\n";
  }
  os << "\n";
  os << "predicted runtime: " << fmt_sec(prep.predicted_sec) << "s\n";
  os << "planning time: " << fmt_sec(prep.planning_sec) << "s\n";
}

void explain_tsv(const RunConfig& cfg, const PreparedPipeline& prep,
                 std::ostringstream& os) {
  os << "spec\t" << cfg.spec_path << "\n";
  os << "nodes\t" << prep.graph.node_count() << "\n";
  for (const auto& [dropped, kept] : prep.merges) {
    os << "merge\t" << dropped << "\t" << kept << "\n";
  }
  for (const auto& [id, c] : prep.choices) {
    os << "choice\t" << prep.graph.node(id).name << "\t" << c.impl << "\t"
       << fmt_sec(c.combined) << "\n";
    for (const auto& [impl, sec, feasible] : c.candidates) {
      os << "candidate\t" << prep.graph.node(id).name << "\t" << impl << "\t"
         << fmt_sec(sec) << "\t" << (feasible ? 1 : 0) << "\n";
    }
  }
  if (planned_policy(cfg.policy)) {
    std::vector<GreedyPick> rows = prep.picks.empty()
                                       ? removal_marginals(prep.profile,
                                                           prep.pinned)
                                       : prep.picks;
    for (const GreedyPick& pk : rows) {
      os << "cache\t" << prep.graph.node(pk.id).name << "\t"
         << fmt_bytes(pk.bytes) << "\t" << fmt_sec(pk.saved_sec) << "\n";
    }
    os << "cache_total\t" << prep.pinned.size() << "\t"
       << fmt_bytes(cache_bytes(prep.profile, prep.pinned)) << "\n";
  }
  os << "predicted_sec\t" << fmt_sec(prep.predicted_sec) << "\n";
  os << "planning_sec\t" << fmt_sec(prep.planning_sec) << "\n";
}

}  // namespace

std::string cmd_explain(const RunConfig& cfg) {
  PreparedPipeline prep = prepare_pipeline(cfg);
  std::ostringstream os;
  if (cfg.tsv) {
    explain_tsv(cfg, prep, os);
  } else {
    explain_text(cfg, prep, os);
  }
  return os.str();
}

std::string cmd_run(const RunConfig& cfg) {
  PreparedPipeline prep = prepare_pipeline(cfg);
  OpContext ctx;
  ctx.cluster = &prep.cluster;
  ctx.bindings = &prep.bindings;
  ctx.threads = cfg.threads;
  ctx.seed = cfg.seed;
  ExecOptions eo;
  eo.budget_bytes = cfg.budget_bytes;
  eo.pinned = prep.pinned;
  eo.lru_admission = cfg.policy == CachePolicy::kLru;
  eo.admission_fraction = cfg.admission_fraction;
  eo.enable_fallback = cfg.fallback;
  ExecResult r =
      execute_pipeline(prep.graph, prep.plan, &prep.profile, ctx, eo);
  if (!cfg.out_path.empty()) write_value(*r.sink_value, cfg.out_path);
  if (!cfg.trace_path.empty()) {
    write_text_file(cfg.trace_path, trace_to_tsv(r));
  }

  std::ostringstream os;
  if (cfg.tsv) {
    os << "policy\t" << cache_policy_name(cfg.policy) << "\n";
    os << "budget_bytes\t" << fmt_bytes(cfg.budget_bytes) << "\n";
    os << "planning_sec\t" << fmt_sec(prep.planning_sec) << "\n";
    os << "execution_sec\t" << fmt_sec(r.wall_sec) << "\n";
    os << "predicted_sec\t" << fmt_sec(prep.predicted_sec) << "\n";
    os << "peak_cache_bytes\t" << fmt_bytes(r.peak_cache_bytes) << "\n";
    os << "pinned_nodes\t" << prep.pinned.size() << "\n";
    os << "records\t" << value_records(*r.sink_value) << "\n";
    os << "fallback\t" << (r.fallback_triggered ? 1 : 0) << "\n";
    for (const std::string& w : r.warnings) os << "warning\t" << w << "\n";
  } else {
    os << "run: " << cfg.spec_path << "\n";
    os << "policy " << cache_policy_name(cfg.policy) << ", budget "
       << fmt_bytes(cfg.budget_bytes) << " bytes\n";
    os << "planning: " << fmt_sec(prep.planning_sec) << "s\n";
    os << "execution: " << fmt_sec(r.wall_sec) << "s (predicted "
       << fmt_sec(prep.predicted_sec) << "s)\n";
    os << "cache: peak " << fmt_bytes(r.peak_cache_bytes) << " bytes, "
       << prep.pinned.size() << " pinned nodes\n";
    if (r.fallback_triggered) os << "fallback: triggered\n";
    for (const std::string& w : r.warnings) {
      os << "warning: " << w << "\n";
    }
    os << "sink: " << value_records(*r.sink_value) << " records";
    if (!cfg.out_path.empty()) os << " -> " << cfg.out_path;
    os << "\n";
    if (!cfg.trace_path.empty()) os << "trace: " << cfg.trace_path << "\n";
  }
  return os.str();
}

namespace {

void bench_rows_out(const std::vector<BenchRow>& rows, bool tsv,
                    std::ostringstream& os) {
  os << (tsv ? "policy\tbudget\tsim_sec\tcached_nodes\tcached_bytes"
               "\tmeasured_sec\n"
             : "policy    budget          sim_sec     nodes  cached_bytes"
               "    measured_sec\n");
  for (const BenchRow& r : rows) {
    std::string nodes =
        r.cached_nodes < 0 ? "-" : std::to_string(r.cached_nodes);
    std::string meas =
        std::isnan(r.measured_sec) ? "-" : fmt_sec(r.measured_sec);
    if (tsv) {
      os << cache_policy_name(r.policy) << "\t" << fmt_bytes(r.budget) << "\t"
         << fmt_sec(r.sim_sec) << "\t" << nodes << "\t"
         << fmt_bytes(r.cached_bytes) << "\t" << meas << "\n";
    } else {
      os << std::left << std::setw(10) << cache_policy_name(r.policy)
         << std::setw(16) << fmt_bytes(r.budget) << std::setw(12)
         << fmt_sec(r.sim_sec) << std::setw(7) << nodes << std::setw(16)
         << fmt_bytes(r.cached_bytes) << meas << "\n";
    }
  }
}

}  // namespace

std::string cmd_bench_cache(const RunConfig& cfg, const BenchCacheConfig& bc) {
  check(!bc.budgets.empty(), ErrorCode::kInvalidArgument,
        "bench-cache needs at least one budget");
  Profile p;
  PreparedPipeline prep;
  bool have_pipeline = false;
  if (!cfg.spec_path.empty()) {
    prep = prepare_pipeline(cfg);
    p = prep.profile;
    have_pipeline = true;
  } else {
    check(!cfg.profile_in.empty(), ErrorCode::kInvalidArgument,
          "bench-cache needs a pipeline file or a saved profile");
    p = load_profile(cfg.profile_in);
  }
  check(bc.trials == 0 || have_pipeline, ErrorCode::kInvalidArgument,
        "measured trials need the pipeline file, not just a profile");

  std::vector<BenchRow> rows = bench_cache_table(
      p, bc.budgets, bc.policies, cfg.admission_fraction, cfg.optimal_guard);

  if (bc.trials > 0) {
    OpContext ctx;
    ctx.cluster = &prep.cluster;
    ctx.bindings = &prep.bindings;
    ctx.threads = cfg.threads;
    ctx.seed = cfg.seed;
    for (BenchRow& row : rows) {
      ExecOptions eo;
      eo.budget_bytes = row.budget;
      eo.pinned = pinned_for(p, row.policy, row.budget, nullptr);
      eo.lru_admission = row.policy == CachePolicy::kLru;
      eo.admission_fraction = cfg.admission_fraction;
      double best = std::numeric_limits<double>::infinity();
      for (int t = 0; t < bc.trials; ++t) {
        ExecResult r =
            execute_pipeline(prep.graph, prep.plan, &p, ctx, eo);
        best = std::min(best, r.wall_sec);
      }
      row.measured_sec = best;
    }
  }

  std::ostringstream os;
  bench_rows_out(rows, cfg.tsv, os);
  return os.str();
}

std::string cmd_bench_synth(const RunConfig& cfg,
                            const SynthBenchConfig& sc) {
  check(sc.instances >= 1, ErrorCode::kInvalidArgument,
        "bench-synth needs at least one instance");
  std::ostringstream os;
  for (int i = 0; i < sc.instances; ++i) {
    const std::uint64_t seed = derive_seed(cfg.seed, 1000 + i);
    Profile p = synth_profile(sc.dag, seed);
    const double total = total_intermediate_bytes(p);
    std::vector<double> budgets;
    for (double f : sc.budget_fracs) budgets.push_back(f * total);
    std::vector<BenchRow> rows = bench_cache_table(
        p, budgets, sc.policies, cfg.admission_fraction, cfg.optimal_guard);
    if (cfg.tsv) {
      for (const BenchRow& r : rows) {
        os << "instance\t" << i << "\t" << cache_policy_name(r.policy) << "\t"
           << fmt_bytes(r.budget) << "\t" << fmt_sec(r.sim_sec) << "\t"
           << fmt_bytes(r.cached_bytes) << "\n";
      }
    } else {
      os << "instance " << i << " (seed " << seed << ", "
         << p.nodes.size() << " nodes, total intermediates "
         << fmt_bytes(total) << " bytes)\n";
      bench_rows_out(rows, false, os);
      os << "\n";
    }
  }
  return os.str();
}

std::string cmd_calibrate(const RunConfig& cfg, const std::string& out_conf) {
  Calibration c = calibrate_desk(cfg.seed);
  const std::string conf = cluster_to_text(c.cluster, c.multipliers);
  if (!out_conf.empty()) write_text_file(out_conf, conf);
  std::ostringstream os;
  for (const std::string& line : c.log) os << line << "\n";
  os << "\n" << conf;
  if (!out_conf.empty()) os << "\nwritten to " << out_conf << "\n";
  return os.str();
}

}  // namespace pipeplan
