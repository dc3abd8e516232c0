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

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tiger/error.hpp"

namespace tiger {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw UsageError("matrix payload has " + std::to_string(data_.size()) +
                       " values, expected " + std::to_string(rows_ * cols_));
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

namespace detail {

// Sum of squares accumulated in ascending index order.
inline double squared_norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc;
}

inline void validate_embedding_rows(const Matrix& m, const char* what,
                                    const std::string& id) {
  if (m.rows() == 0 || m.cols() == 0) {
    throw DomainError(std::string(what) + " '" + id + "' has an empty dimension");
  }
  for (std::size_t r = 0; r < m.rows(); ++r) {
    bool nonzero = false;
    for (double x : m.row(r)) {
      if (!std::isfinite(x)) {
        throw DomainError(std::string(what) + " '" + id + "' row " +
                          std::to_string(r) + " has a non-finite entry");
      }
      nonzero = nonzero || x != 0.0;
    }
    if (!nonzero) {
      throw DomainError(std::string(what) + " '" + id + "' row " +
                        std::to_string(r) + " is the zero vector");
    }
  }
}

}  // namespace detail

/// Region embeddings of one image, one row per region (n x d).
class RegionMatrix {
 public:
  RegionMatrix(std::string image_id, Matrix vectors)
      : image_id_(std::move(image_id)), vectors_(std::move(vectors)) {
    detail::validate_embedding_rows(vectors_, "region matrix", image_id_);
  }

  const std::string& image_id() const noexcept { return image_id_; }
  const Matrix& vectors() const noexcept { return vectors_; }
  std::size_t regions() const noexcept { return vectors_.rows(); }
  std::size_t dim() const noexcept { return vectors_.cols(); }

 private:
  std::string image_id_;
  Matrix vectors_;
};

/// Contextual word embeddings of one caption, one row per token (m x d).
class WordMatrix {
 public:
  WordMatrix(std::string caption_id, Matrix vectors)
      : caption_id_(std::move(caption_id)), vectors_(std::move(vectors)) {
    detail::validate_embedding_rows(vectors_, "word matrix", caption_id_);
  }

  const std::string& caption_id() const noexcept { return caption_id_; }
  const Matrix& vectors() const noexcept { return vectors_; }
  std::size_t tokens() const noexcept { return vectors_.rows(); }
  std::size_t dim() const noexcept { return vectors_.cols(); }

 private:
  std::string caption_id_;
  Matrix vectors_;
};

}  // namespace tiger
