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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "tiger/error.hpp"

namespace tiger {

namespace detail {

inline void check_correlation_input(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw UsageError("correlation inputs differ in length (" + std::to_string(x.size()) +
                     " vs " + std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) throw UsageError("correlation needs at least two observations");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw DomainError("non-finite observation at index " + std::to_string(i));
    }
  }
}

// Pairs tied within runs of equal keys along `order`.
template <typename Equal>
std::int64_t tied_pairs(std::span<const std::size_t> order, Equal equal) {
  std::int64_t total = 0;
  std::int64_t run = 1;
  for (std::size_t k = 1; k <= order.size(); ++k) {
    if (k < order.size() && equal(order[k - 1], order[k])) {
      ++run;
    } else {
      total += run * (run - 1) / 2;
      run = 1;
    }
  }
  return total;
}

// Stable merge sort of `order` by y; returns the number of inversions.
inline std::int64_t merge_count(std::vector<std::size_t>& order, std::span<const double> y) {
  std::int64_t swaps = 0;
  std::vector<std::size_t> buffer(order.size());
  for (std::size_t width = 1; width < order.size(); width *= 2) {
    for (std::size_t lo = 0; lo < order.size(); lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, order.size());
      const std::size_t hi = std::min(lo + 2 * width, order.size());
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (y[order[j]] < y[order[i]]) {
          buffer[k++] = order[j++];
          swaps += static_cast<std::int64_t>(mid - i);
        } else {
          buffer[k++] = order[i++];
        }
      }
      while (i < mid) buffer[k++] = order[i++];
      while (j < hi) buffer[k++] = order[j++];
    }
    std::swap(order, buffer);
  }
  return swaps;
}

}  // namespace detail

/// Kendall tau-b with tie correction, O(n log n) (Knight's algorithm).
inline double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  detail::check_correlation_input(x, y);
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });

  const std::int64_t x_ties =
      detail::tied_pairs(order, [&](std::size_t a, std::size_t b) { return x[a] == x[b]; });
  const std::int64_t joint_ties = detail::tied_pairs(
      order, [&](std::size_t a, std::size_t b) { return x[a] == x[b] && y[a] == y[b]; });
  const std::int64_t swaps = detail::merge_count(order, y);
  const std::int64_t y_ties =
      detail::tied_pairs(order, [&](std::size_t a, std::size_t b) { return y[a] == y[b]; });

  const auto total = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  if (total == x_ties || total == y_ties) {
    throw UndefinedCorrelation("Kendall tau-b undefined: an input has no variance");
  }
  const std::int64_t numerator = total - x_ties - y_ties + joint_ties - 2 * swaps;
  const double denom =
      std::sqrt(static_cast<double>(total - x_ties) * static_cast<double>(total - y_ties));
  return std::clamp(static_cast<double>(numerator) / denom, -1.0, 1.0);
}

/// 1-based ranks; tied values share the mean of their positions.
inline std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && values[order[end]] == values[order[start]]) ++end;
    const double rank = (static_cast<double>(start) + static_cast<double>(end - 1)) / 2.0 + 1.0;
    for (std::size_t k = start; k < end; ++k) ranks[order[k]] = rank;
    start = end;
  }
  return ranks;
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
  detail::check_correlation_input(x, y);
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw UndefinedCorrelation("correlation undefined: an input has no variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Spearman rho: Pearson correlation of average ranks.
inline double spearman_rho(std::span<const double> x, std::span<const double> y) {
  detail::check_correlation_input(x, y);
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  return pearson(rx, ry);
}

}  // namespace tiger
