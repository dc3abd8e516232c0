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

// Feature manifest: a single JSON document naming the region tensor of every
// image and the word tensor of every caption.
//
//   {"d": 300,
//    "regions": {"img1": "regions/img1.tfv", ...},
//    "words":   {"c1": "words/c1.tfv", ...}}
//
// Relative paths resolve against the manifest's directory.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tiger/error.hpp"
#include "tiger/matrix.hpp"
#include "tiger/tensor_io.hpp"

namespace tiger {

struct Manifest {
  std::size_t dim = 0;
  std::map<std::string, std::filesystem::path> regions;
  std::map<std::string, std::filesystem::path> words;
};

namespace detail {

// Parses JSON, rejecting objects that repeat a key.
inline nlohmann::json parse_unique_keys(const std::string& text, const std::string& source) {
  using nlohmann::json;
  std::vector<std::set<std::string>> open_objects;
  try {
    return json::parse(text, [&](int, json::parse_event_t event, json& parsed) {
      switch (event) {
        case json::parse_event_t::object_start:
          open_objects.emplace_back();
          break;
        case json::parse_event_t::object_end:
          open_objects.pop_back();
          break;
        case json::parse_event_t::key: {
          const auto key = parsed.get<std::string>();
          if (!open_objects.back().insert(key).second) {
            throw UsageError(source + ": duplicate id '" + key + "'");
          }
          break;
        }
        default:
          break;
      }
      return true;
    });
  } catch (const json::parse_error& e) {
    throw UsageError(source + ": invalid JSON: " + e.what());
  }
}

inline void check_tensor_file(const std::filesystem::path& path, std::size_t dim,
                              const std::string& id) {
  if (!std::filesystem::exists(path)) {
    throw IoError("tensor for '" + id + "' not found at '" + path.string() + "'");
  }
  const std::vector<std::uint32_t> dims = read_tensor_dims(path);
  if (dims.size() != 2 || dims[1] != dim) {
    throw UsageError("tensor for '" + id + "' at '" + path.string() +
                     "' is not an N x " + std::to_string(dim) + " matrix");
  }
}

}  // namespace detail

/// Reads and validates a manifest. With `check_files`, every referenced
/// tensor must exist and declare a rank-2 shape with the manifest's d.
inline Manifest load_manifest(const std::filesystem::path& path, bool check_files = true) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const nlohmann::json doc = detail::parse_unique_keys(buffer.str(), path.string());

  Manifest m;
  const auto base = path.parent_path();
  if (!doc.is_object() || !doc.contains("d") || !doc["d"].is_number_unsigned() ||
      doc["d"].get<std::size_t>() == 0) {
    throw UsageError(path.string() + ": 'd' must be a positive integer");
  }
  m.dim = doc["d"].get<std::size_t>();
  for (const char* section : {"regions", "words"}) {
    if (!doc.contains(section) || !doc[section].is_object()) {
      throw UsageError(path.string() + ": '" + section + "' must be an object");
    }
    auto& target = std::string(section) == "regions" ? m.regions : m.words;
    for (const auto& [id, rel] : doc[section].items()) {
      if (!rel.is_string()) {
        throw UsageError(path.string() + ": path of '" + id + "' must be a string");
      }
      std::filesystem::path p = rel.get<std::string>();
      if (p.is_relative()) p = base / p;
      if (check_files) detail::check_tensor_file(p, m.dim, id);
      target.emplace(id, std::move(p));
    }
  }
  return m;
}

/// Lazily loaded region and word matrices of a manifest, optionally
/// extended with in-memory matrices. Thread-safe.
class FeatureStore {
 public:
  FeatureStore() = default;
  explicit FeatureStore(Manifest manifest) : manifest_(std::move(manifest)) {}

  void add(RegionMatrix regions) {
    std::lock_guard lock(mutex_);
    auto id = regions.image_id();
    regions_.insert_or_assign(std::move(id),
                              std::make_shared<const RegionMatrix>(std::move(regions)));
  }

  void add(WordMatrix words) {
    std::lock_guard lock(mutex_);
    auto id = words.caption_id();
    words_.insert_or_assign(std::move(id), std::make_shared<const WordMatrix>(std::move(words)));
  }

  const Manifest& manifest() const noexcept { return manifest_; }

  std::shared_ptr<const RegionMatrix> regions(const std::string& image_id) const {
    return load(regions_, manifest_.regions, image_id, "image", [&](Matrix m) {
      return std::make_shared<const RegionMatrix>(image_id, std::move(m));
    });
  }

  std::shared_ptr<const WordMatrix> words(const std::string& caption_id) const {
    return load(words_, manifest_.words, caption_id, "caption", [&](Matrix m) {
      return std::make_shared<const WordMatrix>(caption_id, std::move(m));
    });
  }

 private:
  template <typename T, typename Make>
  std::shared_ptr<const T> load(std::map<std::string, std::shared_ptr<const T>>& memo,
                                const std::map<std::string, std::filesystem::path>& paths,
                                const std::string& id, const char* what, Make make) const {
    {
      std::lock_guard lock(mutex_);
      const auto hit = memo.find(id);
      if (hit != memo.end()) return hit->second;
    }
    const auto it = paths.find(id);
    if (it == paths.end()) {
      throw UsageError(std::string("no tensor for ") + what + " id '" + id + "' in manifest");
    }
    Matrix matrix = to_matrix(read_tensor(it->second));
    if (matrix.cols() != manifest_.dim) {
      throw UsageError(std::string(what) + " '" + id + "' has d=" +
                       std::to_string(matrix.cols()) + ", manifest declares " +
                       std::to_string(manifest_.dim));
    }
    auto value = make(std::move(matrix));
    std::lock_guard lock(mutex_);
    return memo.emplace(id, std::move(value)).first->second;
  }

  Manifest manifest_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, std::shared_ptr<const RegionMatrix>> regions_;
  mutable std::map<std::string, std::shared_ptr<const WordMatrix>> words_;
};

}  // namespace tiger
