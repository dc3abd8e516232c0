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

// Grounding-vector comparison: region rank similarity (NDCG of the
// candidate-induced region ranking with reference-derived gains), weight
// distribution similarity (sigmoid of KL divergence plus log norm ratio),
// and their arithmetic mean.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "tiger/error.hpp"
#include "tiger/grounding.hpp"

namespace tiger {

struct TigerConfig {
  // Temperature of the WDS sigmoid.
  double tau = 1.0;
  // Lower clamp applied to reference scores before they are used as gains.
  double gain_floor = 0.0;

  void validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
      throw UsageError("tau must be positive and finite, got " + std::to_string(tau));
    }
    if (!(gain_floor >= 0.0) || !std::isfinite(gain_floor)) {
      throw UsageError("gain floor must be finite and nonnegative, got " +
                       std::to_string(gain_floor));
    }
  }
};

struct TigerBreakdown {
  double rrs = 0.0;
  double wds = 0.0;
  double d_kl = 0.0;   // nats
  double d_rel = 0.0;  // nats
  double tiger = 0.0;
};

/// Discounted cumulative gain of gains listed in rank order (position 1 first).
inline double dcg(std::span<const double> gains_in_list_order) {
  double total = 0.0;
  for (std::size_t k = 0; k < gains_in_list_order.size(); ++k) {
    total += gains_in_list_order[k] / std::log2(static_cast<double>(k) + 2.0);
  }
  return total;
}

/// Indices sorted by descending score; ties keep ascending index order.
inline std::vector<std::size_t> rank_descending(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  return order;
}

namespace detail {

inline void check_same_length(const GroundingVector& a, const GroundingVector& b) {
  if (a.size() != b.size() || a.size() == 0) {
    throw UsageError("grounding vectors must be nonempty and equal length (" +
                     std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
}

inline double log_sum_exp(std::span<const double> x) {
  const double peak = *std::max_element(x.begin(), x.end());
  double total = 0.0;
  for (double v : x) total += std::exp(v - peak);
  return peak + std::log(total);
}

}  // namespace detail

/// Region rank similarity in [0, 1].
inline double rrs(const GroundingVector& candidate, const GroundingVector& reference,
                  const TigerConfig& cfg) {
  detail::check_same_length(candidate, reference);
  const std::size_t n = reference.size();
  std::vector<double> gains(n);
  for (std::size_t i = 0; i < n; ++i) {
    gains[i] = std::max(cfg.gain_floor, reference.scores[i]);
  }

  std::vector<double> listed(n);
  const std::vector<std::size_t> by_candidate = rank_descending(candidate.scores);
  for (std::size_t k = 0; k < n; ++k) listed[k] = gains[by_candidate[k]];
  const double actual = dcg(listed);

  const std::vector<std::size_t> by_reference = rank_descending(reference.scores);
  for (std::size_t k = 0; k < n; ++k) listed[k] = gains[by_reference[k]];
  const double ideal = dcg(listed);

  if (!(ideal > 0.0)) {
    throw DegenerateInstance("ideal DCG is zero: every reference gain is clamped to " +
                             std::to_string(cfg.gain_floor));
  }
  return std::clamp(actual / ideal, 0.0, 1.0);
}

/// KL(P || Q) in nats with P = softmax(reference), Q = softmax(candidate).
inline double kl_divergence(const GroundingVector& reference,
                            const GroundingVector& candidate) {
  detail::check_same_length(reference, candidate);
  const double lse_p = detail::log_sum_exp(reference.scores);
  const double lse_q = detail::log_sum_exp(candidate.scores);
  double total = 0.0;
  for (std::size_t k = 0; k < reference.size(); ++k) {
    const double log_p = reference.scores[k] - lse_p;
    const double log_q = candidate.scores[k] - lse_q;
    total += std::exp(log_p) * (log_p - log_q);
  }
  return std::max(0.0, total);
}

/// ln(||reference|| / ||candidate||).
inline double relevance_diff(const GroundingVector& reference,
                             const GroundingVector& candidate) {
  const double rr = detail::squared_norm(reference.scores);
  const double cc = detail::squared_norm(candidate.scores);
  if (rr == 0.0 || cc == 0.0) {
    throw DomainError(std::string("relevance difference of a zero-norm grounding vector (") +
                      (rr == 0.0 ? "reference" : "candidate '" + candidate.caption_id + "'") +
                      ")");
  }
  // The ratio form is unchanged when both vectors are scaled by a power of two.
  const double ratio = rr / cc;
  if (std::isnormal(ratio)) return 0.5 * std::log(ratio);
  return 0.5 * (std::log(rr) - std::log(cc));
}

/// 1 - sigmoid(tau * divergence), evaluated without overflow.
inline double wds_from_divergence(double divergence, double tau) {
  const double x = tau * divergence;
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

inline double wds(const GroundingVector& candidate, const GroundingVector& reference,
                  const TigerConfig& cfg) {
  cfg.validate();
  const double divergence =
      kl_divergence(reference, candidate) + relevance_diff(reference, candidate);
  return wds_from_divergence(divergence, cfg.tau);
}

/// Full score breakdown for one candidate against the reference grounding.
inline TigerBreakdown tiger_score(const GroundingVector& candidate,
                                  const GroundingVector& reference,
                                  const TigerConfig& cfg) {
  cfg.validate();
  TigerBreakdown b;
  b.rrs = rrs(candidate, reference, cfg);
  b.d_kl = kl_divergence(reference, candidate);
  b.d_rel = relevance_diff(reference, candidate);
  b.wds = wds_from_divergence(b.d_kl + b.d_rel, cfg.tau);
  b.tiger = (b.rrs + b.wds) / 2.0;
  return b;
}

}  // namespace tiger
