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

// Scores one candidate caption against two references with in-memory
// embeddings, then computes the text baselines for the same captions.

#include <iostream>
#include <vector>

#include "tiger/tiger_eval.hpp"

int main() {
  using tiger::Matrix;

  // Three image regions in a 3-d embedding space.
  const tiger::RegionMatrix image(
      "img", Matrix(3, 3, std::vector<double>{1, 0, 0, 0, 1, 0, 0.6, 0.6, 0.2}));

  const std::vector<tiger::WordMatrix> refs{
      {"ref0", Matrix(2, 3, std::vector<double>{0.9, 0.1, 0, 0.1, 0.9, 0.1})},
      {"ref1", Matrix(3, 3, std::vector<double>{1, 0.2, 0, 0, 1, 0, 0.5, 0.5, 0.3})}};
  const tiger::WordMatrix candidate(
      "cand", Matrix(2, 3, std::vector<double>{0.8, 0.3, 0.1, 0.2, 0.2, 0.9}));

  const tiger::GroundingConfig grounding;
  const tiger::TigerConfig scoring;
  const auto ref_vec = tiger::reference_grounding(image, refs, grounding);
  const auto cand_vec = tiger::grounding_vector(image, candidate, grounding);
  const auto b = tiger::tiger_score(cand_vec, ref_vec, scoring);

  std::cout << "rrs   " << b.rrs << "\n"
            << "wds   " << b.wds << "\n"
            << "d_kl  " << b.d_kl << "\n"
            << "d_rel " << b.d_rel << "\n"
            << "tiger " << b.tiger << "\n";

  const auto cand_text = tiger::tokenize("A dog runs across the grass.");
  const std::vector<tiger::TokenizedCaption> ref_text{
      tiger::tokenize("a dog running on grass"), tiger::tokenize("A brown dog in a field")};
  const std::vector<std::vector<tiger::TokenizedCaption>> corpus{
      ref_text, {tiger::tokenize("a cat on a sofa")}};
  const auto idf = tiger::build_idf(corpus);

  std::cout << "bleu4   " << tiger::bleu(cand_text, ref_text, 4).value << "\n"
            << "rougeL  " << tiger::rouge_l(cand_text, ref_text).value << "\n"
            << "cider   " << tiger::cider(cand_text, ref_text, idf).value << "\n";
  return 0;
}
