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

#include "pipeplan.h"

#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "driver.hpp"
#include "spec_parser.hpp"

using pipeplan::BenchCacheConfig;
using pipeplan::CachePolicy;
using pipeplan::Error;
using pipeplan::ErrorCode;
using pipeplan::RunConfig;
using pipeplan::SynthBenchConfig;

struct pipeplan_session {
  RunConfig cfg;
  std::string last_error;
};

namespace {

int status_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::kInvalidArgument:
      return PIPEPLAN_EINVAL;
    case ErrorCode::kParse:
      return PIPEPLAN_EPARSE;
    case ErrorCode::kTypeMismatch:
      return PIPEPLAN_ETYPE;
    case ErrorCode::kIo:
      return PIPEPLAN_EIO;
    case ErrorCode::kExecution:
      return PIPEPLAN_EEXEC;
    case ErrorCode::kInfeasible:
      return PIPEPLAN_EINFEASIBLE;
    case ErrorCode::kInternal:
      return PIPEPLAN_EINTERNAL;
  }
  return PIPEPLAN_EINTERNAL;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Runs fn, routing the report and any error through the C conventions.
template <typename Fn>
int guarded(pipeplan_session* s, char** report, Fn&& fn) {
  if (s == nullptr) return PIPEPLAN_EINVAL;
  if (report == nullptr) {
    s->last_error = "report output pointer is null";
    return PIPEPLAN_EINVAL;
  }
  *report = nullptr;
  s->last_error.clear();
  try {
    std::string text = fn();
    *report = dup_string(text);
    if (*report == nullptr) {
      s->last_error = "out of memory";
      return PIPEPLAN_EINTERNAL;
    }
    return PIPEPLAN_OK;
  } catch (const Error& e) {
    s->last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    s->last_error = e.what();
    return PIPEPLAN_EINTERNAL;
  }
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<CachePolicy> parse_policies(const std::string& text, char sep) {
  std::vector<CachePolicy> out;
  for (const std::string& tok : split_list(text, sep)) {
    CachePolicy p;
    if (!pipeplan::parse_cache_policy(tok, &p)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "unknown cache policy '" + tok + "'");
    }
    out.push_back(p);
  }
  if (out.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty policy list");
  }
  return out;
}

double parse_number(const std::string& key, const std::string& value) {
  try {
    return pipeplan::parse_size(value);
  } catch (const Error&) {
    throw Error(ErrorCode::kInvalidArgument,
                "option " + key + " needs a number, got '" + value + "'");
  }
}

}  // namespace

extern "C" {

pipeplan_session* pipeplan_create(const char* pipeline_file,
                                  const char* cluster_file) {
  auto* s = new (std::nothrow) pipeplan_session;
  if (s == nullptr) return nullptr;
  if (pipeline_file != nullptr) s->cfg.spec_path = pipeline_file;
  if (cluster_file != nullptr) s->cfg.cluster_path = cluster_file;
  return s;
}

void pipeplan_destroy(pipeplan_session* s) { delete s; }

int pipeplan_set_option(pipeplan_session* s, const char* key,
                        const char* value) {
  if (s == nullptr) return PIPEPLAN_EINVAL;
  if (key == nullptr || value == nullptr) {
    s->last_error = "option key and value must not be null";
    return PIPEPLAN_EINVAL;
  }
  const std::string k = key;
  const std::string v = value;
  try {
    if (k == "budget") {
      s->cfg.budget_bytes = parse_number(k, v);
    } else if (k == "policy") {
      if (!pipeplan::parse_cache_policy(v, &s->cfg.policy)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "unknown cache policy '" + v + "'");
      }
    } else if (k == "seed") {
      s->cfg.seed = static_cast<std::uint64_t>(parse_number(k, v));
    } else if (k == "threads") {
      s->cfg.threads = static_cast<int>(parse_number(k, v));
    } else if (k == "opt_level") {
      const int lvl = static_cast<int>(parse_number(k, v));
      if (lvl < 0 || lvl > 2) {
        throw Error(ErrorCode::kInvalidArgument, "opt_level is 0, 1 or 2");
      }
      s->cfg.opt_level = lvl;
    } else if (k == "format") {
      if (v != "text" && v != "tsv") {
        throw Error(ErrorCode::kInvalidArgument, "format is text or tsv");
      }
      s->cfg.tsv = v == "tsv";
    } else if (k == "profile_in") {
      s->cfg.profile_in = v;
    } else if (k == "profile_out") {
      s->cfg.profile_out = v;
    } else if (k == "out") {
      s->cfg.out_path = v;
    } else if (k == "trace") {
      s->cfg.trace_path = v;
    } else if (k == "admission_fraction") {
      s->cfg.admission_fraction = parse_number(k, v);
    } else if (k == "fallback") {
      if (v == "on" || v == "1") {
        s->cfg.fallback = true;
      } else if (v == "off" || v == "0") {
        s->cfg.fallback = false;
      } else {
        throw Error(ErrorCode::kInvalidArgument, "fallback is on or off");
      }
    } else if (k == "reps") {
      s->cfg.profile_reps = static_cast<int>(parse_number(k, v));
    } else if (k == "optimal_guard") {
      s->cfg.optimal_guard = static_cast<int>(parse_number(k, v));
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown option '" + k + "'");
    }
    s->last_error.clear();
    return PIPEPLAN_OK;
  } catch (const Error& e) {
    s->last_error = e.what();
    return status_of(e.code());
  }
}

int pipeplan_explain(pipeplan_session* s, char** report) {
  return guarded(s, report,
                 [s] { return pipeplan::cmd_explain(s->cfg); });
}

int pipeplan_run(pipeplan_session* s, char** report) {
  return guarded(s, report, [s] { return pipeplan::cmd_run(s->cfg); });
}

int pipeplan_bench_cache(pipeplan_session* s, const char* budgets,
                         const char* policies, int trials, char** report) {
  return guarded(s, report, [&]() -> std::string {
    if (budgets == nullptr) {
      throw Error(ErrorCode::kInvalidArgument,
                  "bench-cache needs a budget list");
    }
    BenchCacheConfig bc;
    for (const std::string& tok : split_list(budgets, ',')) {
      bc.budgets.push_back(parse_number("budgets", tok));
    }
    if (policies != nullptr) bc.policies = parse_policies(policies, ',');
    bc.trials = trials;
    return pipeplan::cmd_bench_cache(s->cfg, bc);
  });
}

int pipeplan_bench_synth(pipeplan_session* s, const char* options,
                         char** report) {
  return guarded(s, report, [&]() -> std::string {
    SynthBenchConfig sc;
    pipeplan::Params p =
        pipeplan::Params::parse_kv(options == nullptr ? "" : options);
    sc.dag.nodes = static_cast<int>(p.get_num("nodes", sc.dag.nodes));
    sc.dag.reuse_p = p.get_num("reuse_p", sc.dag.reuse_p);
    sc.dag.t_mu = p.get_num("t_mu", sc.dag.t_mu);
    sc.dag.t_sigma = p.get_num("t_sigma", sc.dag.t_sigma);
    sc.dag.size_mu = p.get_num("size_mu", sc.dag.size_mu);
    sc.dag.size_sigma = p.get_num("size_sigma", sc.dag.size_sigma);
    sc.dag.estimator_p = p.get_num("estimator_p", sc.dag.estimator_p);
    if (p.has("weights")) {
      sc.dag.weights.clear();
      for (const std::string& tok :
           split_list(p.get_str("weights", ""), ':')) {
        sc.dag.weights.push_back(
            static_cast<int>(parse_number("weights", tok)));
      }
      if (sc.dag.weights.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "empty weight list");
      }
    }
    sc.instances = static_cast<int>(p.get_num("instances", sc.instances));
    if (p.has("budget_fracs")) {
      sc.budget_fracs.clear();
      for (const std::string& tok :
           split_list(p.get_str("budget_fracs", ""), ':')) {
        sc.budget_fracs.push_back(parse_number("budget_fracs", tok));
      }
      if (sc.budget_fracs.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "empty budget_fracs list");
      }
    }
    if (p.has("policies")) {
      sc.policies = parse_policies(p.get_str("policies", ""), ':');
    }
    return pipeplan::cmd_bench_synth(s->cfg, sc);
  });
}

int pipeplan_calibrate(pipeplan_session* s, const char* out_conf,
                       char** report) {
  return guarded(s, report, [&] {
    return pipeplan::cmd_calibrate(
        s->cfg, out_conf == nullptr ? std::string() : out_conf);
  });
}

const char* pipeplan_last_error(const pipeplan_session* s) {
  return s == nullptr ? "" : s->last_error.c_str();
}

void pipeplan_free_string(char* s) { std::free(s); }

const char* pipeplan_version(void) { return "pipeplan 1.0.0"; }

}  // extern "C"
