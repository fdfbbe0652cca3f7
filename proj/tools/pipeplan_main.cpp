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

// Command line front end over the C interface: plan, inspect and run
// pipeline files, benchmark cache policies, and calibrate the cost model.

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pipeplan.h"

namespace {

struct CommonFlags {
  std::string spec;
  std::string cluster;
  std::string budget = "1G";
  std::string policy = "greedy";
  std::string seed = "0";
  int threads = 1;
  int opt_level = 2;
  std::string format = "text";
  std::string profile_in;
  std::string profile_out;
  std::string admission = "0.3";
  int reps = 1;
  int optimal_guard = 16;
};

void add_common(CLI::App* cmd, CommonFlags* f, bool with_spec,
                bool spec_required) {
  if (with_spec) {
    auto* opt = cmd->add_option("spec", f->spec, "pipeline file");
    if (spec_required) opt->required();
  }
  cmd->add_option("--cluster", f->cluster, "cluster descriptor file");
  cmd->add_option("--budget", f->budget,
                  "cache budget in bytes (K/M/G/T suffixes)");
  cmd->add_option("--policy", f->policy,
                  "cache policy: none|greedy|rule|optimal|lru");
  cmd->add_option("--seed", f->seed, "random seed");
  cmd->add_option("--threads", f->threads, "operator worker threads");
  cmd->add_option("--opt", f->opt_level,
                  "0 run as written, 1 merge+cache, 2 +impl selection");
  cmd->add_option("--format", f->format, "report format: text|tsv");
  cmd->add_option("--profile-in", f->profile_in, "reuse a saved profile");
  cmd->add_option("--profile-out", f->profile_out,
                  "save the planning profile");
  cmd->add_option("--admission-fraction", f->admission,
                  "LRU admission cap as a fraction of the budget");
  cmd->add_option("--reps", f->reps, "profiling repetitions");
  cmd->add_option("--optimal-guard", f->optimal_guard,
                  "max nodes for exhaustive benchmark rows");
}

int apply_option(pipeplan_session* s, const char* key,
                 const std::string& value) {
  int rc = pipeplan_set_option(s, key, value.c_str());
  if (rc != PIPEPLAN_OK) {
    std::fprintf(stderr, "error: %s\n", pipeplan_last_error(s));
  }
  return rc;
}

int apply_common(pipeplan_session* s, const CommonFlags& f) {
  const std::pair<const char*, std::string> opts[] = {
      {"budget", f.budget},
      {"policy", f.policy},
      {"seed", f.seed},
      {"threads", std::to_string(f.threads)},
      {"opt_level", std::to_string(f.opt_level)},
      {"format", f.format},
      {"admission_fraction", f.admission},
      {"reps", std::to_string(f.reps)},
      {"optimal_guard", std::to_string(f.optimal_guard)},
  };
  for (const auto& [key, value] : opts) {
    int rc = apply_option(s, key, value);
    if (rc != PIPEPLAN_OK) return rc;
  }
  if (!f.profile_in.empty()) {
    int rc = apply_option(s, "profile_in", f.profile_in);
    if (rc != PIPEPLAN_OK) return rc;
  }
  if (!f.profile_out.empty()) {
    int rc = apply_option(s, "profile_out", f.profile_out);
    if (rc != PIPEPLAN_OK) return rc;
  }
  return PIPEPLAN_OK;
}

// Missing files exit with 2 so scripts can tell data problems from
// planning problems; everything else non-zero is 1.
int exit_code(int status) {
  if (status == PIPEPLAN_OK) return 0;
  return status == PIPEPLAN_EIO ? 2 : 1;
}

int finish(pipeplan_session* s, int status, char* report) {
  if (report != nullptr) {
    std::fputs(report, stdout);
    pipeplan_free_string(report);
  }
  if (status != PIPEPLAN_OK) {
    std::fprintf(stderr, "error: %s\n", pipeplan_last_error(s));
  }
  int rc = exit_code(status);
  pipeplan_destroy(s);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pipeline planner"};
  app.require_subcommand(1);

  CommonFlags f;
  std::string out_path, trace_path;
  bool no_fallback = false;
  std::string budgets, policies;
  int trials = 0;
  std::map<std::string, std::string> synth;
  std::string calibrate_out;

  CLI::App* c_explain = app.add_subcommand(
      "explain", "print the plan: merges, implementation choices, cache set");
  add_common(c_explain, &f, true, true);

  CLI::App* c_run =
      app.add_subcommand("run", "plan and execute the pipeline");
  add_common(c_run, &f, true, true);
  c_run->add_option("--out", out_path, "write the sink value here");
  c_run->add_option("--trace", trace_path, "write the execution trace here");
  c_run->add_flag("--no-fallback", no_fallback,
                  "disable mispredict fallback");

  CLI::App* c_bench = app.add_subcommand(
      "bench-cache", "simulated (and measured) runtime per policy x budget");
  add_common(c_bench, &f, true, false);
  c_bench->add_option("--budgets", budgets, "comma separated budget list")
      ->required();
  c_bench->add_option("--policies", policies, "comma separated policy list");
  c_bench->add_option("--trials", trials, "measured runs per row");

  CLI::App* c_synth = app.add_subcommand(
      "bench-synth", "cache policy benchmark over random DAG profiles");
  add_common(c_synth, &f, false, false);
  for (const char* key :
       {"nodes", "reuse_p", "weights", "t_mu", "t_sigma", "size_mu",
        "size_sigma", "estimator_p", "instances", "budget_fracs",
        "policies"}) {
    std::string flag = "--" + std::string(key);
    for (char& c : flag) {
      if (c == '_') c = '-';
    }
    c_synth->add_option(flag, synth[key],
                        std::string("generator option ") + key);
  }

  CLI::App* c_cal = app.add_subcommand(
      "calibrate", "benchmark this machine and fit cost multipliers");
  add_common(c_cal, &f, false, false);
  c_cal->add_option("--write", calibrate_out,
                    "write the fitted cluster descriptor here");

  CLI11_PARSE(app, argc, argv);

  pipeplan_session* s =
      pipeplan_create(f.spec.empty() ? nullptr : f.spec.c_str(),
                      f.cluster.empty() ? nullptr : f.cluster.c_str());
  if (s == nullptr) {
    std::fprintf(stderr, "error: out of memory\n");
    return 1;
  }
  int rc = apply_common(s, f);
  if (rc != PIPEPLAN_OK) {
    pipeplan_destroy(s);
    return exit_code(rc);
  }

  // Each command fills `report` before finish reads it; keeping the call
  // and the use in separate statements fixes the evaluation order.
  char* report = nullptr;
  if (c_explain->parsed()) {
    int st = pipeplan_explain(s, &report);
    return finish(s, st, report);
  }
  if (c_run->parsed()) {
    if (!out_path.empty() &&
        (rc = apply_option(s, "out", out_path)) != PIPEPLAN_OK) {
      pipeplan_destroy(s);
      return exit_code(rc);
    }
    if (!trace_path.empty() &&
        (rc = apply_option(s, "trace", trace_path)) != PIPEPLAN_OK) {
      pipeplan_destroy(s);
      return exit_code(rc);
    }
    if (no_fallback &&
        (rc = apply_option(s, "fallback", "off")) != PIPEPLAN_OK) {
      pipeplan_destroy(s);
      return exit_code(rc);
    }
    int st = pipeplan_run(s, &report);
    return finish(s, st, report);
  }
  if (c_bench->parsed()) {
    int st = pipeplan_bench_cache(
        s, budgets.c_str(), policies.empty() ? nullptr : policies.c_str(),
        trials, &report);
    return finish(s, st, report);
  }
  if (c_synth->parsed()) {
    std::string kv;
    for (const auto& [key, value] : synth) {
      if (value.empty()) continue;
      if (!kv.empty()) kv += " ";
      kv += key + "=" + value;
    }
    int st = pipeplan_bench_synth(s, kv.c_str(), &report);
    return finish(s, st, report);
  }
  if (c_cal->parsed()) {
    int st = pipeplan_calibrate(
        s, calibrate_out.empty() ? nullptr : calibrate_out.c_str(), &report);
    return finish(s, st, report);
  }
  pipeplan_destroy(s);
  return 1;
}
