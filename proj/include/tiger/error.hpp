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

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace tiger {

// Base of every exception raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mathematically undefined input (zero-norm vector, non-finite value, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Caller broke a precondition (empty reference list, mismatched sizes, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Instance whose ideal DCG is zero; excluded from aggregates by callers.
class DegenerateInstance : public Error {
 public:
  using Error::Error;
};

// Correlation undefined because one input has no variance.
class UndefinedCorrelation : public DomainError {
 public:
  using DomainError::DomainError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

enum class TensorErrorKind {
  kBadMagic,
  kUnsupportedVersion,
  kBadRank,
  kZeroDim,
  kTruncated,
  kTrailingBytes,
  kNonFinite,
};

inline const char* to_string(TensorErrorKind kind) {
  switch (kind) {
    case TensorErrorKind::kBadMagic: return "bad-magic";
    case TensorErrorKind::kUnsupportedVersion: return "unsupported-version";
    case TensorErrorKind::kBadRank: return "bad-rank";
    case TensorErrorKind::kZeroDim: return "zero-dim";
    case TensorErrorKind::kTruncated: return "truncated";
    case TensorErrorKind::kTrailingBytes: return "trailing-bytes";
    case TensorErrorKind::kNonFinite: return "non-finite";
  }
  return "unknown";
}

// Malformed TFV1 content. `offset` is the byte position where decoding failed.
class TensorFormatError : public Error {
 public:
  TensorFormatError(TensorErrorKind kind, std::uint64_t offset,
                    const std::string& detail)
      : Error(std::string("tensor ") + to_string(kind) + " at byte " +
              std::to_string(offset) + ": " + detail),
        kind_(kind),
        offset_(offset),
        detail_(detail) {}

  TensorErrorKind kind() const noexcept { return kind_; }
  std::uint64_t offset() const noexcept { return offset_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  TensorErrorKind kind_;
  std::uint64_t offset_;
  std::string detail_;
};

// Schema violation in a JSONL dataset; `line` is 1-based.
class DatasetError : public UsageError {
 public:
  DatasetError(std::size_t line, const std::string& field,
               const std::string& detail)
      : UsageError("line " + std::to_string(line) + ", field '" + field +
                   "': " + detail),
        line_(line),
        field_(field) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

}  // namespace tiger
