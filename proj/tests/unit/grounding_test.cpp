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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "test_support.hpp"
#include "tiger/grounding.hpp"

namespace tiger {
namespace {

using testing::random_matrix;

RegionMatrix regions_of(std::size_t rows, std::size_t cols, std::vector<double> v) {
  return RegionMatrix("img", Matrix(rows, cols, std::move(v)));
}

WordMatrix words_of(std::size_t rows, std::size_t cols, std::vector<double> v) {
  return WordMatrix("cap", Matrix(rows, cols, std::move(v)));
}

TEST(Cosine, KnownAngle) {
  const std::vector<double> u{1.0, 1.0}, v{1.0, 0.0};
  EXPECT_NEAR(cosine(u, v), 0.7071067811865475244, 1e-15);
}

TEST(Cosine, ParallelAndOpposite) {
  const std::vector<double> u{3.0, -4.0}, v{6.0, -8.0}, w{-3.0, 4.0};
  EXPECT_DOUBLE_EQ(cosine(u, v), 1.0);
  EXPECT_DOUBLE_EQ(cosine(u, w), -1.0);
}

TEST(Cosine, ZeroVectorIsDomainError) {
  const std::vector<double> u{0.0, 0.0}, v{1.0, 0.0};
  EXPECT_THROW(cosine(u, v), DomainError);
}

TEST(Cosine, LengthMismatch) {
  const std::vector<double> u{1.0}, v{1.0, 0.0};
  EXPECT_THROW(cosine(u, v), UsageError);
}

TEST(Matrices, RejectInvalidRows) {
  EXPECT_THROW(regions_of(2, 2, {1.0, 0.0, 0.0, 0.0}), DomainError);
  EXPECT_THROW(words_of(1, 2, {NAN, 1.0}), DomainError);
  EXPECT_THROW(RegionMatrix("img", Matrix()), DomainError);
  EXPECT_THROW(Matrix(2, 2, std::vector<double>{1.0}), UsageError);
}

TEST(Grounding, DimensionMismatch) {
  const auto r = regions_of(1, 2, {1.0, 0.0});
  const auto w = words_of(1, 3, {1.0, 0.0, 0.0});
  EXPECT_THROW(grounding_vector(r, w, {}), UsageError);
}

TEST(Grounding, LambdaValidated) {
  const auto r = regions_of(1, 2, {1.0, 0.0});
  const auto w = words_of(1, 2, {1.0, 0.0});
  EXPECT_THROW(grounding_vector(r, w, GroundingConfig{0.0}), UsageError);
  EXPECT_THROW(grounding_vector(r, w, GroundingConfig{-1.0}), UsageError);
  EXPECT_THROW(grounding_vector(r, w, GroundingConfig{INFINITY}), UsageError);
}

TEST(NormalizedSim, SingleRegionPositiveScoreIsOne) {
  const auto r = regions_of(1, 2, {1.0, 0.2});
  const auto w = words_of(2, 2, {1.0, 0.0, 0.3, 1.0});
  const Matrix sim = normalized_sim(r, w);
  EXPECT_DOUBLE_EQ(sim(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(sim(0, 1), 1.0);
}

TEST(NormalizedSim, NonpositiveColumnIsZero) {
  // Both regions anti-correlated with the word.
  const auto r = regions_of(2, 2, {1.0, 0.0, 0.0, 1.0});
  const auto w = words_of(1, 2, {-1.0, -0.2});
  const Matrix sim = normalized_sim(r, w);
  EXPECT_EQ(sim(0, 0), 0.0);
  EXPECT_EQ(sim(1, 0), 0.0);
}

TEST(NormalizedSim, ColumnsHaveUnitNorm) {
  std::mt19937_64 rng(11);
  const RegionMatrix r("img", random_matrix(rng, 7, 5));
  const WordMatrix w("cap", random_matrix(rng, 9, 5));
  const Matrix sim = normalized_sim(r, w);
  for (std::size_t j = 0; j < sim.cols(); ++j) {
    double ss = 0.0;
    for (std::size_t i = 0; i < sim.rows(); ++i) {
      EXPECT_GE(sim(i, j), 0.0);
      ss += sim(i, j) * sim(i, j);
    }
    if (ss > 0.0) {
      EXPECT_NEAR(ss, 1.0, 1e-14);
    }
  }
}

TEST(Attention, SingleWordCopiesIt) {
  const auto r = regions_of(2, 3, {1.0, 2.0, 0.5, -1.0, 0.0, 1.0});
  const auto w = words_of(1, 3, {0.25, -0.5, 2.0});
  for (std::size_t i = 0; i < 2; ++i) {
    const auto a = attention_vector(r, w, {}, i);
    EXPECT_EQ(a, (std::vector<double>{0.25, -0.5, 2.0}));
  }
}

TEST(Attention, EqualSimilaritiesGiveMidpoint) {
  // One region at 45 degrees to two symmetric words.
  const auto r = regions_of(1, 2, {1.0, 1.0});
  const auto w = words_of(2, 2, {1.0, 0.0, 0.0, 1.0});
  const Matrix sim = normalized_sim(r, w);
  const auto alpha = attention_weights(sim, 0, {});
  EXPECT_DOUBLE_EQ(alpha[0], 0.5);
  EXPECT_DOUBLE_EQ(alpha[1], 0.5);
  const auto a = attended_vector(w, alpha);
  EXPECT_DOUBLE_EQ(a[0], 0.5);
  EXPECT_DOUBLE_EQ(a[1], 0.5);
}

TEST(Attention, SoftmaxOfOneZero) {
  const std::vector<double> sim{1.0, 0.0};
  const auto alpha = detail::softmax_scaled(sim, 1.0);
  EXPECT_NEAR(alpha[0], 0.73105857863000487925, 1e-15);
  EXPECT_NEAR(alpha[1], 0.26894142136999512075, 1e-15);
}

TEST(Attention, LargeLambdaConcentrates) {
  const std::vector<double> sim{0.3, 0.9, 0.5};
  const auto alpha = detail::softmax_scaled(sim, 1e4);
  EXPECT_GE(alpha[1], 1.0 - 1e-6);
}

TEST(Attention, RegionIndexChecked) {
  const Matrix sim(2, 2, 0.5);
  EXPECT_THROW(attention_weights(sim, 2, {}), UsageError);
}

TEST(Grounding, TraceIsConsistent) {
  std::mt19937_64 rng(3);
  const RegionMatrix r("img", random_matrix(rng, 6, 4));
  const WordMatrix w("cap", random_matrix(rng, 5, 4));
  const GroundingConfig cfg{4.0};
  const auto t = grounding_trace(r, w, cfg);
  ASSERT_EQ(t.attention.rows(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    const auto row = t.attention.row(i);
    EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-14);
    EXPECT_NEAR(t.grounding.scores[i], cosine(r.vectors().row(i), t.attended.row(i)), 1e-15);
  }
  EXPECT_EQ(t.grounding.scores, grounding_vector(r, w, cfg).scores);
  EXPECT_EQ(t.grounding.image_id, "img");
  EXPECT_EQ(t.grounding.caption_id, "cap");
}

TEST(Grounding, ScoresWithinUnitInterval) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = testing::uniform_size(rng, 1, 6);
    const RegionMatrix r("img", random_matrix(rng, testing::uniform_size(rng, 1, 10), d));
    const WordMatrix w("cap", random_matrix(rng, testing::uniform_size(rng, 1, 10), d));
    const GroundingConfig cfg{testing::uniform_real(rng, 0.1, 20.0)};
    try {
      for (double s : grounding_vector(r, w, cfg).scores) {
        EXPECT_GE(s, -1.0);
        EXPECT_LE(s, 1.0);
      }
    } catch (const DomainError&) {
      // Attended vector can cancel to zero only in degenerate draws.
    }
  }
}

TEST(Grounding, RegionPermutationPermutesScores) {
  std::mt19937_64 rng(17);
  const Matrix base = random_matrix(rng, 8, 5);
  const WordMatrix w("cap", random_matrix(rng, 6, 5));
  std::vector<std::size_t> perm(8);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Matrix permuted(8, 5);
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t k = 0; k < 5; ++k) permuted(i, k) = base(perm[i], k);
  }
  const auto g = grounding_vector(RegionMatrix("img", base), w, {});
  const auto gp = grounding_vector(RegionMatrix("img", permuted), w, {});
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(gp.scores[i], g.scores[perm[i]], 1e-12);
}

TEST(Grounding, WordMatchingRegionsScoresOne) {
  // Each word is exactly one region and each region one word; with a large
  // lambda the attended vector approaches the matching word.
  const auto r = regions_of(2, 2, {1.0, 0.0, 0.0, 1.0});
  const auto w = words_of(2, 2, {1.0, 0.0, 0.0, 1.0});
  const auto g = grounding_vector(r, w, GroundingConfig{200.0});
  EXPECT_NEAR(g.scores[0], 1.0, 1e-12);
  EXPECT_NEAR(g.scores[1], 1.0, 1e-12);
}

TEST(MeanGrounding, ElementwiseMean) {
  const std::vector<GroundingVector> refs{testing::make_vector({0.2, 0.4}, "a"),
                                          testing::make_vector({0.6, -0.2}, "b")};
  const auto m = mean_grounding(refs);
  EXPECT_DOUBLE_EQ(m.scores[0], 0.4);
  EXPECT_DOUBLE_EQ(m.scores[1], 0.1);
  EXPECT_EQ(m.image_id, "img");
}

TEST(MeanGrounding, OrderInvariantBitForBit) {
  std::mt19937_64 rng(23);
  std::vector<GroundingVector> refs;
  for (int k = 0; k < 7; ++k) {
    std::vector<double> s(12);
    for (auto& x : s) x = testing::uniform_real(rng, -1.0, 1.0);
    refs.push_back(testing::make_vector(s, "r" + std::to_string(k)));
  }
  const auto base = mean_grounding(refs);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(refs.begin(), refs.end(), rng);
    EXPECT_EQ(mean_grounding(refs).scores, base.scores);
  }
}

TEST(MeanGrounding, RejectsEmptyAndRagged) {
  EXPECT_THROW(mean_grounding(std::vector<GroundingVector>{}), UsageError);
  const std::vector<GroundingVector> ragged{testing::make_vector({0.1}),
                                            testing::make_vector({0.1, 0.2})};
  EXPECT_THROW(mean_grounding(ragged), UsageError);
}

TEST(ReferenceGrounding, MatchesManualMean) {
  std::mt19937_64 rng(29);
  const RegionMatrix r("img", random_matrix(rng, 5, 3));
  std::vector<WordMatrix> refs;
  for (int k = 0; k < 3; ++k) refs.emplace_back("r" + std::to_string(k), random_matrix(rng, 4, 3));
  const auto rg = reference_grounding(r, refs, {});
  std::vector<GroundingVector> each;
  for (const auto& w : refs) each.push_back(grounding_vector(r, w, {}));
  EXPECT_EQ(rg.scores, mean_grounding(each).scores);
}

}  // namespace
}  // namespace tiger
