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

// Batch TIGEr scoring. Every distinct (image, caption) grounding is computed
// once, in parallel, into a table; instances are then scored from the table.
// Results are collected by index so output never depends on thread count.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tiger/cache.hpp"
#include "tiger/error.hpp"
#include "tiger/grounding.hpp"
#include "tiger/parallel.hpp"
#include "tiger/tiger.hpp"

namespace tiger {

struct ScoringTask {
  std::string image_id;
  std::string candidate_id;
  std::vector<std::string> reference_ids;
};

struct InstanceOutcome {
  std::optional<TigerBreakdown> breakdown;
  std::string skip_reason;  // set when breakdown is empty

  bool ok() const noexcept { return breakdown.has_value(); }
};

using GroundingKey = std::pair<std::string, std::string>;  // (image_id, caption_id)

class GroundingTable {
 public:
  // Returns nullptr and sets `why` when the grounding could not be computed.
  const GroundingVector* find(const GroundingKey& key, std::string* why = nullptr) const {
    const auto it = vectors_.find(key);
    if (it != vectors_.end()) return &it->second;
    if (why != nullptr) {
      const auto f = failures_.find(key);
      *why = f != failures_.end() ? f->second : "grounding of (" + key.first + ", " + key.second + ") not computed";
    }
    return nullptr;
  }

  std::size_t size() const noexcept { return vectors_.size(); }

 private:
  friend GroundingTable compute_groundings(const Grounder&, std::span<const GroundingKey>,
                                           std::size_t);
  std::map<GroundingKey, GroundingVector> vectors_;
  std::map<GroundingKey, std::string> failures_;
};

/// Computes each key once. Domain errors (degenerate attention) are recorded
/// per key; any other error aborts.
inline GroundingTable compute_groundings(const Grounder& grounder,
                                         std::span<const GroundingKey> keys,
                                         std::size_t threads) {
  std::vector<GroundingKey> unique;
  std::set<GroundingKey> seen;
  for (const auto& k : keys) {
    if (seen.insert(k).second) unique.push_back(k);
  }
  std::vector<std::optional<GroundingVector>> results(unique.size());
  std::vector<std::string> errors(unique.size());
  parallel_for(unique.size(), threads, [&](std::size_t i) {
    try {
      results[i] = grounder.ground(unique[i].first, unique[i].second);
    } catch (const DomainError& e) {
      errors[i] = e.what();
    }
  });
  GroundingTable table;
  for (std::size_t i = 0; i < unique.size(); ++i) {
    if (results[i]) {
      table.vectors_.emplace(unique[i], std::move(*results[i]));
    } else {
      table.failures_.emplace(unique[i], errors[i]);
    }
  }
  return table;
}

inline std::vector<GroundingKey> grounding_keys(std::span<const ScoringTask> tasks) {
  std::vector<GroundingKey> keys;
  for (const auto& t : tasks) {
    keys.emplace_back(t.image_id, t.candidate_id);
    for (const auto& r : t.reference_ids) keys.emplace_back(t.image_id, r);
  }
  return keys;
}

/// Scores one task; degenerate or undefined instances become skip reasons.
inline InstanceOutcome score_task(const GroundingTable& table, const ScoringTask& task,
                                  const TigerConfig& cfg) {
  InstanceOutcome out;
  if (task.reference_ids.empty()) {
    out.skip_reason = "no references";
    return out;
  }
  const GroundingVector* candidate = table.find({task.image_id, task.candidate_id}, &out.skip_reason);
  if (candidate == nullptr) return out;
  std::vector<GroundingVector> refs;
  refs.reserve(task.reference_ids.size());
  for (const auto& r : task.reference_ids) {
    const GroundingVector* v = table.find({task.image_id, r}, &out.skip_reason);
    if (v == nullptr) return out;
    refs.push_back(*v);
  }
  try {
    out.breakdown = tiger_score(*candidate, mean_grounding(refs), cfg);
  } catch (const DegenerateInstance& e) {
    out.skip_reason = std::string("degenerate: ") + e.what();
  } catch (const DomainError& e) {
    out.skip_reason = std::string("undefined: ") + e.what();
  }
  return out;
}

inline std::vector<InstanceOutcome> score_tasks(const GroundingTable& table,
                                                std::span<const ScoringTask> tasks,
                                                const TigerConfig& cfg, std::size_t threads) {
  cfg.validate();
  std::vector<InstanceOutcome> outcomes(tasks.size());
  parallel_for(tasks.size(), threads,
               [&](std::size_t i) { outcomes[i] = score_task(table, tasks[i], cfg); });
  return outcomes;
}

inline std::vector<InstanceOutcome> score_tasks(const Grounder& grounder,
                                                std::span<const ScoringTask> tasks,
                                                const TigerConfig& cfg, std::size_t threads) {
  cfg.validate();
  const std::vector<GroundingKey> keys = grounding_keys(tasks);
  const GroundingTable table = compute_groundings(grounder, keys, threads);
  return score_tasks(table, tasks, cfg, threads);
}

}  // namespace tiger
