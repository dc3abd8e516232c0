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

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace tiger {

/// Runs fn(i) for i in [0, count) on up to `threads` workers with a static
/// strided partition. Callers write results into slot i, so output order
/// never depends on scheduling. If several calls throw, the exception from
/// the lowest index is rethrown.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  struct Failure {
    std::size_t index = static_cast<std::size_t>(-1);
    std::exception_ptr error;
  };
  std::vector<Failure> failures(threads);
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        for (std::size_t i = t; i < count; i += threads) {
          try {
            fn(i);
          } catch (...) {
            failures[t] = {i, std::current_exception()};
            return;
          }
        }
      });
    }
  }
  const auto first = std::min_element(failures.begin(), failures.end(),
                                      [](const Failure& a, const Failure& b) {
                                        return a.index < b.index;
                                      });
  if (first->error) std::rethrow_exception(first->error);
}

}  // namespace tiger
