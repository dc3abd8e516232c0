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

// Text-to-image grounding: per-region scores telling how strongly a caption
// attends to each region of an image.
//
// For regions v_1..v_n and words w_1..w_m (same dimension d):
//   score(v_i, w_j) = cos(v_i, w_j)
//   sim(v_i, w_j)   = max(0, score_ij) / sqrt(sum_k max(0, score_kj)^2)
//   alpha_ij        = softmax_j(lambda * sim_ij)
//   a_i             = sum_j alpha_ij w_j
//   s_i             = cos(v_i, a_i)
//
// All reductions run in ascending index order with double accumulators so
// results are bit-reproducible regardless of threading.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tiger/error.hpp"
#include "tiger/matrix.hpp"

namespace tiger {

struct GroundingConfig {
  // Inverse temperature of the word attention softmax.
  double lambda = 9.0;

  void validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      throw UsageError("lambda must be positive and finite, got " +
                       std::to_string(lambda));
    }
  }
};

struct GroundingVector {
  std::string image_id;
  std::string caption_id;
  std::vector<double> scores;

  std::size_t size() const noexcept { return scores.size(); }
};

/// Cosine similarity, clamped to [-1, 1].
inline double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw UsageError("cosine of vectors with lengths " + std::to_string(u.size()) +
                     " and " + std::to_string(v.size()));
  }
  double dot = 0.0;
  double uu = 0.0;
  double vv = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!std::isfinite(u[k]) || !std::isfinite(v[k])) {
      throw DomainError("cosine input has a non-finite entry at index " +
                        std::to_string(k));
    }
    dot += u[k] * v[k];
    uu += u[k] * u[k];
    vv += v[k] * v[k];
  }
  if (uu == 0.0 || vv == 0.0) {
    throw DomainError(std::string("cosine of a zero-norm vector (") +
                      (uu == 0.0 ? "first" : "second") + " argument)");
  }
  return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

namespace detail {

inline void check_compatible(const RegionMatrix& regions, const WordMatrix& words) {
  if (regions.dim() != words.dim()) {
    throw UsageError("dimension mismatch: image '" + regions.image_id() + "' has d=" +
                     std::to_string(regions.dim()) + ", caption '" +
                     words.caption_id() + "' has d=" + std::to_string(words.dim()));
  }
}

inline std::vector<double> row_norms(const Matrix& m) {
  std::vector<double> norms(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    norms[r] = std::sqrt(squared_norm(m.row(r)));
  }
  return norms;
}

// Raw cosine matrix (n x m). Dot products are accumulated column-parallel
// over the transposed word matrix; each entry still sums k = 0..d-1 in order.
inline Matrix cosine_matrix(const RegionMatrix& regions, const WordMatrix& words) {
  const Matrix& v = regions.vectors();
  const Matrix& w = words.vectors();
  const std::size_t n = v.rows();
  const std::size_t m = w.rows();
  const std::size_t d = v.cols();

  std::vector<double> wt(d * m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < d; ++k) wt[k * m + j] = w(j, k);
  }
  const std::vector<double> vn = row_norms(v);
  const std::vector<double> wn = row_norms(w);

  Matrix out(n, m);
  std::vector<double> acc(m);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    const auto vi = v.row(i);
    for (std::size_t k = 0; k < d; ++k) {
      const double x = vi[k];
      const double* col = wt.data() + k * m;
      for (std::size_t j = 0; j < m; ++j) acc[j] += x * col[j];
    }
    for (std::size_t j = 0; j < m; ++j) {
      out(i, j) = std::clamp(acc[j] / (vn[i] * wn[j]), -1.0, 1.0);
    }
  }
  return out;
}

// Numerically stable softmax of lambda * row.
inline std::vector<double> softmax_scaled(std::span<const double> row, double lambda) {
  std::vector<double> out(row.size());
  double peak = -HUGE_VAL;
  for (std::size_t j = 0; j < row.size(); ++j) {
    out[j] = lambda * row[j];
    peak = std::max(peak, out[j]);
  }
  double total = 0.0;
  for (double& e : out) {
    e = std::exp(e - peak);
    total += e;
  }
  for (double& e : out) e /= total;
  return out;
}

}  // namespace detail

/// Normalized similarity (n x m): positive cosine parts, each word column
/// scaled to unit L2 norm over regions. All-nonpositive columns stay zero.
inline Matrix normalized_sim(const RegionMatrix& regions, const WordMatrix& words) {
  detail::check_compatible(regions, words);
  Matrix sim = detail::cosine_matrix(regions, words);
  const std::size_t n = sim.rows();
  const std::size_t m = sim.cols();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) sim(i, j) = std::max(0.0, sim(i, j));
  }
  for (std::size_t j = 0; j < m; ++j) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += sim(i, j) * sim(i, j);
    if (ss == 0.0) continue;
    const double norm = std::sqrt(ss);
    for (std::size_t i = 0; i < n; ++i) sim(i, j) /= norm;
  }
  return sim;
}

/// Attention weights of one region over the caption's words.
inline std::vector<double> attention_weights(const Matrix& sim, std::size_t region,
                                             const GroundingConfig& cfg) {
  if (region >= sim.rows()) {
    throw UsageError("region index " + std::to_string(region) + " out of range");
  }
  return detail::softmax_scaled(sim.row(region), cfg.lambda);
}

// Attention-weighted mean of word vectors.
inline std::vector<double> attended_vector(const WordMatrix& words,
                                           std::span<const double> weights) {
  const Matrix& w = words.vectors();
  std::vector<double> a(w.cols(), 0.0);
  for (std::size_t j = 0; j < w.rows(); ++j) {
    const double alpha = weights[j];
    const auto wj = w.row(j);
    for (std::size_t k = 0; k < a.size(); ++k) a[k] += alpha * wj[k];
  }
  return a;
}

/// Attention feature vector a_i for region `region`.
inline std::vector<double> attention_vector(const RegionMatrix& regions,
                                            const WordMatrix& words,
                                            const GroundingConfig& cfg,
                                            std::size_t region) {
  cfg.validate();
  const Matrix sim = normalized_sim(regions, words);
  return attended_vector(words, attention_weights(sim, region, cfg));
}

/// Every intermediate of one grounding computation.
struct GroundingTrace {
  Matrix sim;        // n x m
  Matrix attention;  // n x m, rows sum to 1
  Matrix attended;   // n x d
  GroundingVector grounding;
};

inline GroundingTrace grounding_trace(const RegionMatrix& regions,
                                      const WordMatrix& words,
                                      const GroundingConfig& cfg) {
  cfg.validate();
  GroundingTrace t;
  t.sim = normalized_sim(regions, words);
  const std::size_t n = regions.regions();
  const std::size_t m = words.tokens();
  const std::size_t d = regions.dim();
  t.attention = Matrix(n, m);
  t.attended = Matrix(n, d);
  t.grounding.image_id = regions.image_id();
  t.grounding.caption_id = words.caption_id();
  t.grounding.scores.resize(n);

  const std::vector<double> vn = detail::row_norms(regions.vectors());
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> alpha = attention_weights(t.sim, i, cfg);
    std::copy(alpha.begin(), alpha.end(), t.attention.row(i).begin());
    const std::vector<double> a = attended_vector(words, alpha);
    std::copy(a.begin(), a.end(), t.attended.row(i).begin());

    const auto vi = regions.vectors().row(i);
    double dot = 0.0;
    double aa = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      dot += vi[k] * a[k];
      aa += a[k] * a[k];
    }
    if (aa == 0.0) {
      throw DomainError("attended vector of region " + std::to_string(i) +
                        " for caption '" + words.caption_id() +
                        "' has zero norm");
    }
    t.grounding.scores[i] = std::clamp(dot / (vn[i] * std::sqrt(aa)), -1.0, 1.0);
  }
  return t;
}

/// Grounding vector s(V, C).
inline GroundingVector grounding_vector(const RegionMatrix& regions,
                                        const WordMatrix& words,
                                        const GroundingConfig& cfg) {
  return grounding_trace(regions, words, cfg).grounding;
}

/// Elementwise mean of grounding vectors. Each element's values are sorted
/// before summation so the result does not depend on input order.
inline GroundingVector mean_grounding(std::span<const GroundingVector> vectors) {
  if (vectors.empty()) throw UsageError("reference list is empty");
  const std::size_t n = vectors.front().size();
  GroundingVector out;
  out.image_id = vectors.front().image_id;
  out.caption_id = "<references>";
  out.scores.resize(n);
  std::vector<double> column(vectors.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < vectors.size(); ++r) {
      if (vectors[r].size() != n) {
        throw UsageError("reference grounding vectors differ in length");
      }
      column[r] = vectors[r].scores[i];
    }
    std::sort(column.begin(), column.end());
    double total = 0.0;
    for (double x : column) total += x;
    out.scores[i] = std::clamp(total / static_cast<double>(column.size()), -1.0, 1.0);
  }
  return out;
}

/// Mean grounding vector s(V, R) over the reference captions.
inline GroundingVector reference_grounding(const RegionMatrix& regions,
                                           std::span<const WordMatrix> refs,
                                           const GroundingConfig& cfg) {
  if (refs.empty()) throw UsageError("reference list is empty");
  std::vector<GroundingVector> per_ref;
  per_ref.reserve(refs.size());
  for (const WordMatrix& r : refs) per_ref.push_back(grounding_vector(regions, r, cfg));
  return mean_grounding(per_ref);
}

}  // namespace tiger
