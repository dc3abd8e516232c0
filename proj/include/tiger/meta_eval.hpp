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

// Metric quality against human judgments: rank correlation reports,
// pairwise preference accuracy, reference-count sweeps and the mapping of
// continuous scores onto a human n-point scale.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tiger/correlation.hpp"
#include "tiger/error.hpp"

namespace tiger {

enum class PairType { kHC = 0, kHI = 1, kHM = 2, kMM = 3 };
enum class HumanChoice { kA, kB };

inline constexpr std::array<PairType, 4> kPairTypes = {PairType::kHC, PairType::kHI,
                                                       PairType::kHM, PairType::kMM};

inline const char* to_string(PairType t) {
  switch (t) {
    case PairType::kHC: return "HC";
    case PairType::kHI: return "HI";
    case PairType::kHM: return "HM";
    case PairType::kMM: return "MM";
  }
  return "?";
}

inline std::optional<PairType> parse_pair_type(const std::string& s) {
  for (PairType t : kPairTypes) {
    if (s == to_string(t)) return t;
  }
  return std::nullopt;
}

struct EvalInstance {
  std::string image_id;
  std::string candidate_id;
  double metric_score = 0.0;
  double human_score = 0.0;
};

struct PairInstance {
  std::string image_id;
  std::string candidate_a;
  std::string candidate_b;
  HumanChoice human_choice = HumanChoice::kA;
  PairType pair_type = PairType::kHC;
};

struct AccuracyCell {
  std::size_t correct = 0;
  std::size_t total = 0;

  std::optional<double> accuracy() const {
    if (total == 0) return std::nullopt;
    return static_cast<double>(correct) / static_cast<double>(total);
  }
};

struct PairwiseAccuracy {
  std::array<AccuracyCell, 4> by_type;
  AccuracyCell all;
  // Pairs with a NaN score (metric undefined for a candidate); not counted.
  std::size_t excluded = 0;

  const AccuracyCell& operator[](PairType t) const {
    return by_type[static_cast<std::size_t>(t)];
  }
};

/// A pair is correct only when the human-preferred candidate scores strictly
/// higher; equal scores count as incorrect.
inline bool pair_correct(HumanChoice choice, double score_a, double score_b) {
  return choice == HumanChoice::kA ? score_a > score_b : score_b > score_a;
}

/// `scores[k]` holds the metric scores of (candidate_a, candidate_b) of pair k.
/// A NaN score marks the pair as excluded.
inline PairwiseAccuracy pairwise_accuracy(std::span<const PairInstance> pairs,
                                          std::span<const std::pair<double, double>> scores) {
  if (pairs.size() != scores.size()) {
    throw UsageError("pairwise accuracy: " + std::to_string(pairs.size()) + " pairs but " +
                     std::to_string(scores.size()) + " score pairs");
  }
  PairwiseAccuracy acc;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (std::isnan(scores[k].first) || std::isnan(scores[k].second)) {
      ++acc.excluded;
      continue;
    }
    const bool ok = pair_correct(pairs[k].human_choice, scores[k].first, scores[k].second);
    auto& cell = acc.by_type[static_cast<std::size_t>(pairs[k].pair_type)];
    ++cell.total;
    ++acc.all.total;
    if (ok) {
      ++cell.correct;
      ++acc.all.correct;
    }
  }
  return acc;
}

inline PairwiseAccuracy pairwise_accuracy(std::span<const PairInstance> pairs,
                                          const std::map<std::string, double>& scores) {
  std::vector<std::pair<double, double>> flat;
  flat.reserve(pairs.size());
  std::vector<std::string> missing;
  auto lookup = [&](const std::string& id) {
    const auto it = scores.find(id);
    if (it != scores.end()) return it->second;
    if (std::find(missing.begin(), missing.end(), id) == missing.end()) missing.push_back(id);
    return 0.0;
  };
  for (const auto& p : pairs) {
    const double a = lookup(p.candidate_a);
    const double b = lookup(p.candidate_b);
    flat.emplace_back(a, b);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw UsageError("missing metric scores for candidates: " + list);
  }
  return pairwise_accuracy(pairs, flat);
}

struct MetricReport {
  std::string metric;
  std::optional<double> kendall_tau;   // empty when undefined (all ties)
  std::optional<double> spearman_rho;  // empty when undefined (all ties)
  std::size_t instances = 0;
  std::size_t degenerate = 0;
};

inline MetricReport make_metric_report(std::string metric, std::span<const double> metric_scores,
                                       std::span<const double> human_scores,
                                       std::size_t degenerate = 0) {
  MetricReport r;
  r.metric = std::move(metric);
  r.instances = metric_scores.size();
  r.degenerate = degenerate;
  try {
    r.kendall_tau = kendall_tau_b(metric_scores, human_scores);
  } catch (const UndefinedCorrelation&) {
  }
  try {
    r.spearman_rho = spearman_rho(metric_scores, human_scores);
  } catch (const UndefinedCorrelation&) {
  }
  return r;
}

/// Assigns each instance a label from `human_scores` so that sorting by
/// metric score reproduces the human label histogram: the lowest-scored
/// instances get the lowest human level, and so on. Ties in metric score keep
/// input order.
template <typename Label>
std::vector<Label> map_score_groups(std::span<const double> metric_scores,
                                    std::span<const Label> human_scores,
                                    std::size_t n_levels) {
  if (metric_scores.size() != human_scores.size()) {
    throw UsageError("score group mapping inputs differ in length");
  }
  if (n_levels < 2) throw UsageError("score group mapping needs at least two levels");
  for (double s : metric_scores) {
    if (!std::isfinite(s)) throw DomainError("non-finite metric score in group mapping");
  }
  std::map<Label, std::size_t> histogram;
  for (const Label& h : human_scores) ++histogram[h];
  if (histogram.size() > n_levels) {
    throw UsageError("human scores take " + std::to_string(histogram.size()) +
                     " distinct values but only " + std::to_string(n_levels) +
                     " levels were declared");
  }

  std::vector<std::size_t> order(metric_scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return metric_scores[a] < metric_scores[b];
  });

  std::vector<Label> groups(metric_scores.size());
  auto level = histogram.begin();
  std::size_t used = 0;
  for (std::size_t idx : order) {
    while (used == level->second) {
      ++level;
      used = 0;
    }
    groups[idx] = level->first;
    ++used;
  }
  return groups;
}

// Seeded sampling helpers. Only the raw mt19937_64 stream is used (its output
// is fixed by the standard), so sweeps reproduce across standard libraries.
namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = (UINT64_MAX / bound) * bound;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

}  // namespace detail

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return detail::splitmix64(master ^ detail::splitmix64(stream));
}

/// Uniform k-subset of {0..population-1} without replacement, ascending.
inline std::vector<std::size_t> sample_subset(std::size_t population, std::size_t k,
                                              std::mt19937_64& rng) {
  if (k > population) throw UsageError("sample larger than population");
  std::vector<std::size_t> pool(population);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(detail::uniform_below(rng, population - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

struct SweepPoint {
  std::size_t ref_count = 0;
  PairwiseAccuracy accuracy;
  // Images that had fewer references than requested and used all of them.
  std::size_t clamped_images = 0;
};

/// Pairwise accuracy as a function of the number of references.
///
/// For every requested count one subset of reference indices is drawn per
/// image (uniform, without replacement, seeded from `seed` and the count);
/// every pair of that image uses the same subset. `scorer` receives one
/// ascending index list per pair and returns (score_a, score_b) per pair.
template <typename Scorer>
std::vector<SweepPoint> reference_sweep(std::span<const PairInstance> pairs,
                                        std::span<const std::size_t> references_per_pair,
                                        Scorer&& scorer,
                                        std::span<const std::size_t> ref_counts,
                                        std::uint64_t seed) {
  if (pairs.size() != references_per_pair.size()) {
    throw UsageError("reference sweep: reference counts do not match pairs");
  }
  std::vector<std::string> images;
  std::unordered_map<std::string, std::size_t> available;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [it, inserted] = available.emplace(pairs[k].image_id, references_per_pair[k]);
    if (inserted) {
      images.push_back(pairs[k].image_id);
    } else if (it->second != references_per_pair[k]) {
      throw UsageError("image '" + pairs[k].image_id +
                       "' has pairs with different reference counts");
    }
    if (references_per_pair[k] == 0) {
      throw UsageError("image '" + pairs[k].image_id + "' has no references");
    }
  }

  std::vector<SweepPoint> curve;
  curve.reserve(ref_counts.size());
  for (const std::size_t count : ref_counts) {
    if (count == 0) throw UsageError("reference count must be at least 1");
    std::mt19937_64 rng(derive_seed(seed, count));
    SweepPoint point;
    point.ref_count = count;
    std::unordered_map<std::string, std::vector<std::size_t>> subset;
    for (const auto& image : images) {
      const std::size_t avail = available.at(image);
      if (count > avail) ++point.clamped_images;
      subset.emplace(image, sample_subset(avail, std::min(count, avail), rng));
    }
    std::vector<std::vector<std::size_t>> per_pair;
    per_pair.reserve(pairs.size());
    for (const auto& p : pairs) per_pair.push_back(subset.at(p.image_id));
    const std::vector<std::pair<double, double>> scores =
        scorer(std::span<const std::vector<std::size_t>>(per_pair));
    point.accuracy = pairwise_accuracy(pairs, scores);
    curve.push_back(std::move(point));
  }
  return curve;
}

}  // namespace tiger
