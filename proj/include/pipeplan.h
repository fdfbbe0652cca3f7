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

/* C interface to the pipeline planner.  A session wraps one pipeline file
 * plus planning options; commands return malloc'd reports the caller frees
 * with pipeplan_free_string.  All functions returning int give a
 * PIPEPLAN_* status; on failure pipeplan_last_error holds the message. */

#ifndef PIPEPLAN_INCLUDE_PIPEPLAN_H_
#define PIPEPLAN_INCLUDE_PIPEPLAN_H_

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define PIPEPLAN_API __declspec(dllexport)
#else
#define PIPEPLAN_API __attribute__((visibility("default")))
#endif

#define PIPEPLAN_OK 0
#define PIPEPLAN_EINVAL 1      /* bad argument or option */
#define PIPEPLAN_EPARSE 2      /* malformed pipeline, cluster or data file */
#define PIPEPLAN_ETYPE 3       /* pipeline edge type mismatch */
#define PIPEPLAN_EIO 4         /* missing or unwritable file */
#define PIPEPLAN_EEXEC 5       /* failure while running the pipeline */
#define PIPEPLAN_EINFEASIBLE 6 /* no implementation fits the cluster */
#define PIPEPLAN_EINTERNAL 7

typedef struct pipeplan_session pipeplan_session;

/* Both paths may be NULL: a pipeline file is only needed by explain, run
 * and (unless a saved profile is set) bench_cache. */
PIPEPLAN_API pipeplan_session* pipeplan_create(const char* pipeline_file,
                                               const char* cluster_file);
PIPEPLAN_API void pipeplan_destroy(pipeplan_session* s);

/* Options, all passed as strings:
 *   budget              cache budget in bytes; decimal K/M/G/T suffixes
 *   policy              none | greedy | rule | optimal | lru
 *   seed                unsigned integer
 *   threads             worker threads for operator execution
 *   opt_level           0 as written, 1 merge + cache, 2 + impl selection
 *   format              text | tsv
 *   profile_in          reuse this saved profile instead of measuring
 *   profile_out         save the planning profile here
 *   out                 write the sink value here (run)
 *   trace               write the execution trace TSV here (run)
 *   admission_fraction  LRU admission cap as a fraction of the budget
 *   fallback            on | off: mispredict fallback during run
 *   reps                profiling repetitions per measurement
 *   optimal_guard       max nodes for exhaustive benchmark rows */
PIPEPLAN_API int pipeplan_set_option(pipeplan_session* s, const char* key,
                                     const char* value);

PIPEPLAN_API int pipeplan_explain(pipeplan_session* s, char** report);
PIPEPLAN_API int pipeplan_run(pipeplan_session* s, char** report);

/* budgets: comma-separated sizes ("1M,64M,1G").  policies: comma-separated
 * policy names, or NULL for none,rule,lru,greedy.  trials > 0 adds measured
 * executor runs (needs the pipeline file). */
PIPEPLAN_API int pipeplan_bench_cache(pipeplan_session* s,
                                      const char* budgets,
                                      const char* policies, int trials,
                                      char** report);

/* Random DAG benchmark.  options is a "key=value ..." list:
 *   nodes, reuse_p, weights (e.g. 1:5:20), t_mu, t_sigma, size_mu,
 *   size_sigma, estimator_p, instances, budget_fracs (e.g. 0.25:0.5:1),
 *   policies (e.g. greedy:lru:optimal).  NULL keeps all defaults. */
PIPEPLAN_API int pipeplan_bench_synth(pipeplan_session* s,
                                      const char* options, char** report);

/* Benchmarks this machine, fits cost multipliers, and (when out_conf is
 * not NULL) writes the resulting cluster descriptor file. */
PIPEPLAN_API int pipeplan_calibrate(pipeplan_session* s,
                                    const char* out_conf, char** report);

PIPEPLAN_API const char* pipeplan_last_error(const pipeplan_session* s);
PIPEPLAN_API void pipeplan_free_string(char* s);
PIPEPLAN_API const char* pipeplan_version(void);

#undef PIPEPLAN_API

#ifdef __cplusplus
}
#endif

#endif /* PIPEPLAN_INCLUDE_PIPEPLAN_H_ */
