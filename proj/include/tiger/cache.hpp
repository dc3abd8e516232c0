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

// Grounding providers. `DirectGrounder` recomputes every vector;
// `GroundingCache` memoizes vectors on disk under a SHA-256 of the region
// matrix, the word matrix and lambda.
//
// Cache entry layout (little-endian):
//   "TGC1" | n (u32) | n x float64 scores | SHA-256(key || preceding bytes)
//
// Entries are written to a temporary file and renamed into place; one writer
// process per cache directory.

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <system_error>
#include <thread>
#include <unistd.h>
#include <vector>

#include "tiger/error.hpp"
#include "tiger/grounding.hpp"
#include "tiger/manifest.hpp"
#include "tiger/tensor_io.hpp"

namespace tiger {

class Grounder {
 public:
  virtual ~Grounder() = default;
  virtual GroundingVector ground(const std::string& image_id,
                                 const std::string& caption_id) const = 0;
  virtual const GroundingConfig& config() const = 0;
};

class DirectGrounder : public Grounder {
 public:
  DirectGrounder(std::shared_ptr<const FeatureStore> store, GroundingConfig cfg)
      : store_(std::move(store)), cfg_(cfg) {
    cfg_.validate();
  }

  GroundingVector ground(const std::string& image_id,
                         const std::string& caption_id) const override {
    return grounding_vector(*store_->regions(image_id), *store_->words(caption_id), cfg_);
  }
  const GroundingConfig& config() const override { return cfg_; }

 private:
  std::shared_ptr<const FeatureStore> store_;
  GroundingConfig cfg_;
};

using Sha256 = std::array<unsigned char, 32>;

class Sha256Builder {
 public:
  Sha256Builder() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw Error("SHA-256 initialisation failed");
    }
  }

  Sha256Builder& add(std::span<const unsigned char> bytes) {
    EVP_DigestUpdate(ctx_.get(), bytes.data(), bytes.size());
    return *this;
  }
  Sha256Builder& add(const std::string& s) {
    add_u64(s.size());
    return add(std::span(reinterpret_cast<const unsigned char*>(s.data()), s.size()));
  }
  Sha256Builder& add_u64(std::uint64_t v) {
    std::array<unsigned char, 8> b{};
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    return add(b);
  }
  Sha256Builder& add_double(double v) { return add_u64(std::bit_cast<std::uint64_t>(v)); }
  Sha256Builder& add(const Matrix& m) {
    add_u64(m.rows());
    add_u64(m.cols());
    for (double v : m.values()) add_double(v);
    return *this;
  }

  Sha256 finish() {
    Sha256 out{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), out.data(), &len);
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

inline std::string to_hex(const Sha256& digest) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned char b : digest) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xF]);
  }
  return out;
}

struct CacheStats {
  std::size_t hits = 0;
  std::size_t computed = 0;   // no entry on disk
  std::size_t recovered = 0;  // entry present but invalid, recomputed
};

class GroundingCache : public Grounder {
 public:
  using WarningSink = std::function<void(const std::string&)>;

  GroundingCache(std::shared_ptr<const FeatureStore> store, GroundingConfig cfg,
                 std::filesystem::path directory, WarningSink warn = {})
      : store_(std::move(store)), cfg_(cfg), dir_(std::move(directory)), warn_(std::move(warn)) {
    cfg_.validate();
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create cache directory '" + dir_.string() + "': " + ec.message());
  }

  const GroundingConfig& config() const override { return cfg_; }
  const std::filesystem::path& directory() const noexcept { return dir_; }

  CacheStats stats() const {
    return {hits_.load(), computed_.load(), recovered_.load()};
  }

  GroundingVector ground(const std::string& image_id,
                         const std::string& caption_id) const override {
    return ground(*store_->regions(image_id), *store_->words(caption_id));
  }

  GroundingVector ground(const RegionMatrix& regions, const WordMatrix& words) const {
    const Sha256 key = key_for(regions, words);
    const auto path = entry_path(key);
    GroundingVector v;
    v.image_id = regions.image_id();
    v.caption_id = words.caption_id();

    if (std::filesystem::exists(path)) {
      std::string problem;
      if (decode_entry(path, key, regions.regions(), v.scores, problem)) {
        ++hits_;
        return v;
      }
      ++recovered_;
      if (warn_) {
        warn_("cache entry " + path.filename().string() + " for (" + v.image_id + ", " +
              v.caption_id + ") is invalid (" + problem + "); recomputing");
      }
    } else {
      ++computed_;
    }
    v = grounding_vector(regions, words, cfg_);
    store_entry(path, key, v.scores);
    return v;
  }

  Sha256 key_for(const RegionMatrix& regions, const WordMatrix& words) const {
    Sha256Builder h;
    h.add(std::string("tiger-grounding-v1"));
    h.add_double(cfg_.lambda);
    h.add(regions.vectors());
    h.add(words.vectors());
    return h.finish();
  }

  std::filesystem::path entry_path(const Sha256& key) const {
    return dir_ / (to_hex(key) + ".tgc");
  }

 private:
  static Sha256 checksum(const Sha256& key, std::span<const unsigned char> body) {
    Sha256Builder h;
    h.add(key);
    h.add(body);
    return h.finish();
  }

  static bool decode_entry(const std::filesystem::path& path, const Sha256& key,
                           std::size_t expected_n, std::vector<double>& scores,
                           std::string& problem) {
    std::vector<unsigned char> bytes;
    try {
      bytes = detail::read_file_bytes(path);
    } catch (const IoError& e) {
      problem = e.what();
      return false;
    }
    const std::size_t body = 8 + 8 * expected_n;
    if (bytes.size() != body + 32) {
      problem = "size " + std::to_string(bytes.size()) + ", expected " + std::to_string(body + 32);
      return false;
    }
    if (bytes[0] != 'T' || bytes[1] != 'G' || bytes[2] != 'C' || bytes[3] != '1' ||
        detail::get_u32(bytes, 4) != expected_n) {
      problem = "bad header";
      return false;
    }
    const Sha256 sum = checksum(key, std::span(bytes).first(body));
    if (!std::equal(sum.begin(), sum.end(), bytes.begin() + static_cast<std::ptrdiff_t>(body))) {
      problem = "checksum mismatch";
      return false;
    }
    scores.resize(expected_n);
    for (std::size_t i = 0; i < expected_n; ++i) {
      const std::uint64_t bits = static_cast<std::uint64_t>(detail::get_u32(bytes, 8 + 8 * i)) |
                                 static_cast<std::uint64_t>(detail::get_u32(bytes, 12 + 8 * i))
                                     << 32;
      scores[i] = std::bit_cast<double>(bits);
    }
    return true;
  }

  void store_entry(const std::filesystem::path& path, const Sha256& key,
                   std::span<const double> scores) const {
    std::vector<unsigned char> bytes = {'T', 'G', 'C', '1'};
    detail::put_u32(bytes, static_cast<std::uint32_t>(scores.size()));
    for (double s : scores) {
      const auto bits = std::bit_cast<std::uint64_t>(s);
      detail::put_u32(bytes, static_cast<std::uint32_t>(bits));
      detail::put_u32(bytes, static_cast<std::uint32_t>(bits >> 32));
    }
    const Sha256 sum = checksum(key, bytes);
    bytes.insert(bytes.end(), sum.begin(), sum.end());

    std::ostringstream tmp_name;
    tmp_name << path.filename().string() << ".tmp." << ::getpid() << '.'
             << std::hash<std::thread::id>{}(std::this_thread::get_id());
    const auto tmp = path.parent_path() / tmp_name.str();
    detail::write_file_bytes(tmp, bytes);
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
      std::filesystem::remove(tmp, ec);
      throw IoError("cannot move cache entry into '" + path.string() + "'");
    }
  }

  std::shared_ptr<const FeatureStore> store_;
  GroundingConfig cfg_;
  std::filesystem::path dir_;
  WarningSink warn_;
  mutable std::atomic<std::size_t> hits_{0};
  mutable std::atomic<std::size_t> computed_{0};
  mutable std::atomic<std::size_t> recovered_{0};
};

/// Opens (creating if needed) a grounding cache for the manifest's features.
inline std::shared_ptr<GroundingCache> cache_grounding(const Manifest& manifest,
                                                       const GroundingConfig& cfg,
                                                       const std::filesystem::path& store_path,
                                                       GroundingCache::WarningSink warn = {}) {
  return std::make_shared<GroundingCache>(std::make_shared<const FeatureStore>(manifest), cfg,
                                          store_path, std::move(warn));
}

}  // namespace tiger
