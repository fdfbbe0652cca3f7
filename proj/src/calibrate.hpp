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

#ifndef PIPEPLAN_SRC_CALIBRATE_HPP_
#define PIPEPLAN_SRC_CALIBRATE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "costmodel.hpp"

namespace pipeplan {

// Measured machine characteristics plus fitted per-implementation cost
// multipliers.  log holds one human-readable line per fitted point.
struct Calibration {
  ClusterResourceDescriptor cluster;
  ImplMultipliers multipliers;
  std::vector<std::string> log;
};

// Sustained multiply-add throughput (operations per second) from a dense
// matrix product of known size; best of `reps` runs.
double measure_cpu_throughput(std::uint64_t seed, int reps = 3);

// Sustained copy bandwidth in bytes per second.
double measure_mem_bandwidth(std::uint64_t seed, int reps = 3);

// Benchmarks this machine, then fits one exec multiplier per solver, PCA,
// and convolution implementation from two timed problems each, least
// squares through the origin.  Distributed variants run their local
// algorithm here, so their exec multipliers inherit the local fit;
// coordination multipliers stay 1 (nothing to measure with one worker).
Calibration calibrate_desk(std::uint64_t seed);

}  // namespace pipeplan

#endif  // PIPEPLAN_SRC_CALIBRATE_HPP_
