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

// JSONL datasets, one record per line. Scored records:
//
//   {"image_id": "img1",
//    "candidate": {"id": "c1", "text": "a dog runs on the grass"},
//    "references": [{"id": "r1", "text": "a brown dog running"}, ...],
//    "human_score": 4,                 // or "human_scores": [3, 4, 4]
//    "scale": {"min": 1, "max": 5}}
//
// Pair records:
//
//   {"image_id": "img1",
//    "candidate_a": {"id": "a1", "text": "..."},
//    "candidate_b": {"id": "b1", "text": "..."},
//    "human_choice": "A",              // "A" or "B"
//    "pair_type": "HC",                // HC, HI, HM or MM
//    "references": [{"id": "r1", "text": "..."}, ...]}
//
// Blank lines are skipped. A multi-grader "human_scores" list is averaged.

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "tiger/error.hpp"
#include "tiger/meta_eval.hpp"

namespace tiger {

struct Caption {
  std::string id;
  std::string text;
};

struct ScoreScale {
  double min = 1.0;
  double max = 5.0;
};

struct ScoredRecord {
  std::string image_id;
  Caption candidate;
  std::vector<Caption> references;
  double human_score = 0.0;
  ScoreScale scale;
};

struct PairRecord {
  std::string image_id;
  Caption candidate_a;
  Caption candidate_b;
  HumanChoice human_choice = HumanChoice::kA;
  PairType pair_type = PairType::kHC;
  std::vector<Caption> references;

  PairInstance instance() const {
    return {image_id, candidate_a.id, candidate_b.id, human_choice, pair_type};
  }
};

enum class DatasetKind { kScored, kPairs };

namespace detail {

using nlohmann::json;

inline const json& require(const json& obj, std::size_t line, const char* field) {
  const auto it = obj.find(field);
  if (it == obj.end()) throw DatasetError(line, field, "missing");
  return *it;
}

inline std::string require_id(const json& obj, std::size_t line, const std::string& field) {
  const auto it = obj.find("id");
  if (it == obj.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw DatasetError(line, field + ".id", "must be a nonempty string");
  }
  return it->get<std::string>();
}

inline Caption parse_caption(const json& v, std::size_t line, const std::string& field) {
  if (!v.is_object()) throw DatasetError(line, field, "must be an object with id and text");
  Caption c;
  c.id = require_id(v, line, field);
  const auto text = v.find("text");
  if (text == v.end() || !text->is_string()) {
    throw DatasetError(line, field + ".text", "must be a string");
  }
  c.text = text->get<std::string>();
  return c;
}

inline std::string parse_image_id(const json& obj, std::size_t line) {
  const json& v = require(obj, line, "image_id");
  if (!v.is_string() || v.get<std::string>().empty()) {
    throw DatasetError(line, "image_id", "must be a nonempty string");
  }
  return v.get<std::string>();
}

inline std::vector<Caption> parse_references(const json& obj, std::size_t line) {
  const json& refs = require(obj, line, "references");
  if (!refs.is_array() || refs.empty()) {
    throw DatasetError(line, "references", "must be a nonempty array");
  }
  std::vector<Caption> out;
  std::set<std::string> ids;
  for (std::size_t k = 0; k < refs.size(); ++k) {
    const std::string field = "references[" + std::to_string(k) + "]";
    out.push_back(parse_caption(refs[k], line, field));
    if (!ids.insert(out.back().id).second) {
      throw DatasetError(line, field + ".id", "duplicate reference id '" + out.back().id + "'");
    }
  }
  return out;
}

inline double finite_number(const json& v, std::size_t line, const std::string& field) {
  if (!v.is_number()) throw DatasetError(line, field, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw DatasetError(line, field, "must be finite");
  return x;
}

inline ScoredRecord parse_scored(const json& obj, std::size_t line) {
  ScoredRecord r;
  r.image_id = parse_image_id(obj, line);
  r.candidate = parse_caption(require(obj, line, "candidate"), line, "candidate");
  r.references = parse_references(obj, line);

  const json& scale = require(obj, line, "scale");
  if (!scale.is_object()) throw DatasetError(line, "scale", "must be an object {min, max}");
  r.scale.min = finite_number(require(scale, line, "min"), line, "scale.min");
  r.scale.max = finite_number(require(scale, line, "max"), line, "scale.max");
  if (!(r.scale.min < r.scale.max)) throw DatasetError(line, "scale", "min must be below max");

  const bool single = obj.contains("human_score");
  const bool multi = obj.contains("human_scores");
  if (single == multi) {
    throw DatasetError(line, "human_score",
                       "exactly one of human_score or human_scores is required");
  }
  if (single) {
    r.human_score = finite_number(obj["human_score"], line, "human_score");
  } else {
    const json& grades = obj["human_scores"];
    if (!grades.is_array() || grades.empty()) {
      throw DatasetError(line, "human_scores", "must be a nonempty array");
    }
    double total = 0.0;
    for (std::size_t k = 0; k < grades.size(); ++k) {
      const std::string field = "human_scores[" + std::to_string(k) + "]";
      const double g = finite_number(grades[k], line, field);
      if (g < r.scale.min || g > r.scale.max) throw DatasetError(line, field, "outside scale");
      total += g;
    }
    r.human_score = total / static_cast<double>(grades.size());
  }
  if (r.human_score < r.scale.min || r.human_score > r.scale.max) {
    throw DatasetError(line, "human_score", "outside scale");
  }
  return r;
}

inline PairRecord parse_pair(const json& obj, std::size_t line) {
  PairRecord r;
  r.image_id = parse_image_id(obj, line);
  r.candidate_a = parse_caption(require(obj, line, "candidate_a"), line, "candidate_a");
  r.candidate_b = parse_caption(require(obj, line, "candidate_b"), line, "candidate_b");
  if (r.candidate_a.id == r.candidate_b.id) {
    throw DatasetError(line, "candidate_b.id", "candidates must be distinct");
  }
  const json& choice = require(obj, line, "human_choice");
  if (choice == "A") {
    r.human_choice = HumanChoice::kA;
  } else if (choice == "B") {
    r.human_choice = HumanChoice::kB;
  } else {
    throw DatasetError(line, "human_choice", "must be \"A\" or \"B\"");
  }
  const json& type = require(obj, line, "pair_type");
  const auto parsed = type.is_string() ? parse_pair_type(type.get<std::string>()) : std::nullopt;
  if (!parsed) throw DatasetError(line, "pair_type", "must be one of HC, HI, HM, MM");
  r.pair_type = *parsed;
  r.references = parse_references(obj, line);
  return r;
}

template <typename Record, typename Parse>
std::vector<Record> parse_jsonl(std::istream& in, Parse parse) {
  std::vector<Record> records;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      throw DatasetError(line, "<record>", std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw DatasetError(line, "<record>", "must be a JSON object");
    records.push_back(parse(obj, line));
  }
  return records;
}

inline std::ifstream open_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path.string() + "'");
  return in;
}

}  // namespace detail

inline std::vector<ScoredRecord> parse_scored_dataset(std::istream& in) {
  return detail::parse_jsonl<ScoredRecord>(in, detail::parse_scored);
}

inline std::vector<PairRecord> parse_pair_dataset(std::istream& in) {
  return detail::parse_jsonl<PairRecord>(in, detail::parse_pair);
}

inline std::vector<ScoredRecord> load_scored_dataset(const std::filesystem::path& path) {
  auto in = detail::open_dataset(path);
  return parse_scored_dataset(in);
}

inline std::vector<PairRecord> load_pair_dataset(const std::filesystem::path& path) {
  auto in = detail::open_dataset(path);
  return parse_pair_dataset(in);
}

}  // namespace tiger
