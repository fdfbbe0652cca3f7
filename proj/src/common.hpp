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

#ifndef PIPEPLAN_COMMON_HPP_
#define PIPEPLAN_COMMON_HPP_

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace pipeplan {

using NodeId = std::uint32_t;

constexpr double kBytesPerScalar = 8.0;

enum class ErrorCode {
  kInvalidArgument,
  kParse,
  kTypeMismatch,
  kIo,
  kExecution,
  kInfeasible,
  kInternal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

inline void check(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

// Monotonic wall-clock in seconds.
inline double now_sec() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace pipeplan

#endif  // PIPEPLAN_COMMON_HPP_
