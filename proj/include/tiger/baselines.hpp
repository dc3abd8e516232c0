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

// Text-only caption metrics: BLEU-1/4 (sentence level, closest reference
// length, no smoothing), ROUGE-L (LCS F-measure, beta = 1.2) and CIDEr
// (tf-idf cosine over 1..4-grams with a Gaussian length penalty).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tiger/error.hpp"
#include "tiger/text.hpp"

namespace tiger {

inline constexpr std::size_t kMaxNgram = 4;

struct BaselineScore {
  double value = 0.0;
  // Set when the candidate had no tokens; value is then 0.
  bool empty_candidate = false;
};

using NgramCounts = std::map<std::string, std::size_t>;

/// Counts of the n-grams of `tokens`, keyed by space-joined tokens.
inline NgramCounts ngram_counts(std::span<const std::string> tokens, std::size_t n) {
  NgramCounts counts;
  if (n == 0 || tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t k = 1; k < n; ++k) {
      key.push_back(' ');
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

namespace detail {

inline void require_refs(std::span<const TokenizedCaption> refs) {
  if (refs.empty()) throw UsageError("reference list is empty");
}

// Closest reference length; ties resolve to the shorter reference.
inline std::size_t closest_ref_length(std::size_t c, std::span<const TokenizedCaption> refs) {
  std::size_t best = refs.front().size();
  for (const auto& r : refs) {
    const std::size_t len = r.size();
    const auto gap = [c](std::size_t x) { return x > c ? x - c : c - x; };
    if (gap(len) < gap(best) || (gap(len) == gap(best) && len < best)) best = len;
  }
  return best;
}

}  // namespace detail

/// Sentence BLEU with n-gram orders 1..max_n. Orders longer than the
/// candidate contribute no precision term.
inline BaselineScore bleu(const TokenizedCaption& candidate,
                          std::span<const TokenizedCaption> refs, std::size_t max_n) {
  detail::require_refs(refs);
  if (max_n == 0 || max_n > kMaxNgram) {
    throw UsageError("BLEU order must be in 1.." + std::to_string(kMaxNgram));
  }
  if (candidate.empty()) return {0.0, true};

  const std::size_t c = candidate.size();
  const std::size_t orders = std::min(max_n, c);
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= orders; ++n) {
    const NgramCounts cand = ngram_counts(candidate.tokens, n);
    NgramCounts max_ref;
    for (const auto& r : refs) {
      for (const auto& [gram, count] : ngram_counts(r.tokens, n)) {
        auto& slot = max_ref[gram];
        slot = std::max(slot, count);
      }
    }
    std::size_t clipped = 0;
    for (const auto& [gram, count] : cand) {
      const auto it = max_ref.find(gram);
      if (it != max_ref.end()) clipped += std::min(count, it->second);
    }
    if (clipped == 0) return {0.0, false};
    log_sum += std::log(static_cast<double>(clipped) / static_cast<double>(c - n + 1));
  }

  const std::size_t r = detail::closest_ref_length(c, refs);
  const double penalty =
      c < r ? std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c)) : 1.0;
  return {std::min(1.0, penalty * std::exp(log_sum / static_cast<double>(orders))), false};
}

/// Length of the longest common subsequence.
inline std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

/// ROUGE-L F-measure, maximum over references.
inline BaselineScore rouge_l(const TokenizedCaption& candidate,
                             std::span<const TokenizedCaption> refs, double beta = 1.2) {
  detail::require_refs(refs);
  if (candidate.empty()) return {0.0, true};
  double best = 0.0;
  for (const auto& r : refs) {
    const std::size_t lcs = lcs_length(candidate.tokens, r.tokens);
    if (lcs == 0) continue;
    const double p = static_cast<double>(lcs) / static_cast<double>(candidate.size());
    const double rec = static_cast<double>(lcs) / static_cast<double>(r.size());
    const double b2 = beta * beta;
    best = std::max(best, ((1.0 + b2) * p * rec) / (rec + b2 * p));
  }
  return {std::min(1.0, best), false};
}

/// Document frequencies of 1..4-grams, one document per reference set.
class CorpusIdf {
 public:
  std::size_t corpus_size() const noexcept { return corpus_size_; }

  std::size_t document_frequency(const std::string& gram, std::size_t n) const {
    if (n == 0 || n > kMaxNgram) return 0;
    const auto it = df_[n - 1].find(gram);
    return it == df_[n - 1].end() ? 0 : it->second;
  }

  // log(N) - log(max(1, df)); unseen n-grams get the maximum weight log(N).
  double idf(const std::string& gram, std::size_t n) const {
    const double df = static_cast<double>(std::max<std::size_t>(1, document_frequency(gram, n)));
    return std::log(static_cast<double>(corpus_size_)) - std::log(df);
  }

 private:
  friend CorpusIdf build_idf(std::span<const std::vector<TokenizedCaption>>);

  std::size_t corpus_size_ = 0;
  std::array<std::map<std::string, std::size_t>, kMaxNgram> df_;
};

inline CorpusIdf build_idf(std::span<const std::vector<TokenizedCaption>> all_reference_sets) {
  CorpusIdf idf;
  idf.corpus_size_ = all_reference_sets.size();
  for (const auto& refs : all_reference_sets) {
    for (std::size_t n = 1; n <= kMaxNgram; ++n) {
      std::set<std::string> seen;
      for (const auto& r : refs) {
        for (const auto& entry : ngram_counts(r.tokens, n)) seen.insert(entry.first);
      }
      for (const auto& gram : seen) ++idf.df_[n - 1][gram];
    }
  }
  return idf;
}

namespace detail {

struct TfIdfVector {
  std::array<std::map<std::string, double>, kMaxNgram> weights;
  std::array<double, kMaxNgram> norms{};
  std::size_t length = 0;
};

inline TfIdfVector tfidf(const TokenizedCaption& caption, const CorpusIdf& idf) {
  TfIdfVector v;
  v.length = caption.size();
  for (std::size_t n = 1; n <= kMaxNgram; ++n) {
    double ss = 0.0;
    for (const auto& [gram, count] : ngram_counts(caption.tokens, n)) {
      const double w = static_cast<double>(count) * idf.idf(gram, n);
      v.weights[n - 1].emplace(gram, w);
      ss += w * w;
    }
    v.norms[n - 1] = std::sqrt(ss);
  }
  return v;
}

}  // namespace detail

/// CIDEr: 10 x mean over n of the mean-over-references length-penalized
/// tf-idf cosine.
inline BaselineScore cider(const TokenizedCaption& candidate,
                           std::span<const TokenizedCaption> refs, const CorpusIdf& idf,
                           double sigma = 6.0) {
  if (idf.corpus_size() == 0) throw UsageError("CIDEr needs a nonempty idf corpus");
  detail::require_refs(refs);
  if (candidate.empty()) return {0.0, true};

  const detail::TfIdfVector cand = detail::tfidf(candidate, idf);
  std::vector<double> per_ref;
  per_ref.reserve(refs.size());
  for (const auto& r : refs) {
    const detail::TfIdfVector ref = detail::tfidf(r, idf);
    const double delta =
        static_cast<double>(cand.length) - static_cast<double>(ref.length);
    const double penalty = std::exp(-(delta * delta) / (2.0 * sigma * sigma));
    double total = 0.0;
    for (std::size_t n = 0; n < kMaxNgram; ++n) {
      if (cand.norms[n] == 0.0 || ref.norms[n] == 0.0) continue;
      double dot = 0.0;
      for (const auto& [gram, w] : cand.weights[n]) {
        const auto it = ref.weights[n].find(gram);
        if (it != ref.weights[n].end()) dot += w * it->second;
      }
      total += std::min(1.0, dot / (cand.norms[n] * ref.norms[n])) * penalty;
    }
    per_ref.push_back(total / static_cast<double>(kMaxNgram));
  }
  std::sort(per_ref.begin(), per_ref.end());
  double sum = 0.0;
  for (double x : per_ref) sum += x;
  return {10.0 * sum / static_cast<double>(per_ref.size()), false};
}

}  // namespace tiger
