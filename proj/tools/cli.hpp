/*
 * Copyright 2026 The tiger-eval Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace tiger::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitIo = 2,
  kExitDegenerateOnly = 3,
};

// Environment variable naming the on-disk grounding cache directory.
inline constexpr const char* kCacheDirEnv = "TIGER_CACHE_DIR";

struct RunConfig {
  std::string subcommand;
  std::string manifest;
  std::string dataset;
  std::string pairs;
  std::vector<std::string> scores;
  std::string metric = "tiger";
  double lambda = 9.0;
  double tau = 1.0;
  double gain_floor = 0.0;
  std::vector<std::size_t> refs;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
  std::size_t threads = 1;
};

// Runs the command line `args` (program name excluded). Reports go to `out`
// unless --out is given; progress and diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tiger::cli
