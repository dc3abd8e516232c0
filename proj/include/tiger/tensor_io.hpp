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

// TFV1 tensor container.
//
//   offset  size       field
//   0       4          magic "TFV1"
//   4       2          version (u16, currently 1)
//   6       1          rank (u8, 1..8)
//   7       4 * rank   dims (u32 each, all > 0)
//   ...     4 * prod   payload, row-major float32
//
// Every multi-byte field is little-endian regardless of host byte order.

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "tiger/error.hpp"
#include "tiger/matrix.hpp"

namespace tiger {

inline constexpr char kTensorMagic[4] = {'T', 'F', 'V', '1'};
inline constexpr std::uint16_t kTensorVersion = 1;
inline constexpr std::size_t kMaxTensorRank = 8;

struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> values;

  std::uint64_t element_count() const {
    std::uint64_t count = 1;
    for (auto d : dims) count *= d;
    return count;
  }
  friend bool operator==(const Tensor&, const Tensor&) = default;
};

namespace detail {

inline void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

inline void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<unsigned char>((v >> s) & 0xFF));
}

inline std::uint32_t get_u32(std::span<const unsigned char> in, std::size_t at) {
  return static_cast<std::uint32_t>(in[at]) | static_cast<std::uint32_t>(in[at + 1]) << 8 |
         static_cast<std::uint32_t>(in[at + 2]) << 16 |
         static_cast<std::uint32_t>(in[at + 3]) << 24;
}

inline std::vector<unsigned char> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
  return bytes;
}

inline void write_file_bytes(const std::filesystem::path& path,
                             std::span<const unsigned char> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failure on '" + path.string() + "'");
}

}  // namespace detail

/// Canonical TFV1 bytes for `tensor`.
inline std::vector<unsigned char> encode_tensor(const Tensor& tensor) {
  if (tensor.dims.empty() || tensor.dims.size() > kMaxTensorRank) {
    throw UsageError("tensor rank must be in 1.." + std::to_string(kMaxTensorRank));
  }
  for (auto d : tensor.dims) {
    if (d == 0) throw UsageError("tensor dimensions must be positive");
  }
  if (tensor.element_count() != tensor.values.size()) {
    throw UsageError("tensor payload does not match its dimensions");
  }
  std::vector<unsigned char> out(kTensorMagic, kTensorMagic + 4);
  detail::put_u16(out, kTensorVersion);
  out.push_back(static_cast<unsigned char>(tensor.dims.size()));
  for (auto d : tensor.dims) detail::put_u32(out, d);
  out.reserve(out.size() + 4 * tensor.values.size());
  for (float v : tensor.values) {
    if (!std::isfinite(v)) throw DomainError("refusing to encode a non-finite tensor value");
    detail::put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

/// Parses the header; returns the dims and the payload offset.
inline std::vector<std::uint32_t> decode_tensor_header(std::span<const unsigned char> bytes,
                                                       std::size_t* payload_offset = nullptr) {
  using K = TensorErrorKind;
  if (bytes.size() < 4) {
    throw TensorFormatError(K::kTruncated, bytes.size(), "file shorter than the magic");
  }
  for (std::size_t i = 0; i < 4; ++i) {
    if (bytes[i] != static_cast<unsigned char>(kTensorMagic[i])) {
      throw TensorFormatError(K::kBadMagic, 0, "expected \"TFV1\"");
    }
  }
  if (bytes.size() < 7) throw TensorFormatError(K::kTruncated, bytes.size(), "header cut short");
  const auto version = static_cast<std::uint16_t>(bytes[4] | bytes[5] << 8);
  if (version != kTensorVersion) {
    throw TensorFormatError(K::kUnsupportedVersion, 4,
                            "version " + std::to_string(version) + " is not supported");
  }
  const std::size_t rank = bytes[6];
  if (rank == 0 || rank > kMaxTensorRank) {
    throw TensorFormatError(K::kBadRank, 6, "rank " + std::to_string(rank));
  }
  const std::size_t header = 7 + 4 * rank;
  if (bytes.size() < header) {
    throw TensorFormatError(K::kTruncated, bytes.size(),
                            "header needs " + std::to_string(header) + " bytes");
  }
  std::vector<std::uint32_t> dims(rank);
  for (std::size_t r = 0; r < rank; ++r) {
    dims[r] = detail::get_u32(bytes, 7 + 4 * r);
    if (dims[r] == 0) {
      throw TensorFormatError(K::kZeroDim, 7 + 4 * r, "dimension " + std::to_string(r) + " is 0");
    }
  }
  if (payload_offset != nullptr) *payload_offset = header;
  return dims;
}

inline Tensor decode_tensor(std::span<const unsigned char> bytes) {
  using K = TensorErrorKind;
  std::size_t offset = 0;
  Tensor t;
  t.dims = decode_tensor_header(bytes, &offset);

  // Checked against the available bytes dimension by dimension to avoid overflow.
  const std::uint64_t available = (bytes.size() - offset) / 4;
  std::uint64_t count = 1;
  bool too_big = false;
  for (auto d : t.dims) {
    count *= d;
    if (count > available) {
      too_big = true;
      break;
    }
  }
  if (too_big) {
    std::string expected = "payload of " + std::to_string(t.dims[0]);
    for (std::size_t r = 1; r < t.dims.size(); ++r) expected += "x" + std::to_string(t.dims[r]);
    throw TensorFormatError(K::kTruncated, bytes.size(),
                            expected + " floats, only " + std::to_string(bytes.size() - offset) +
                                " payload bytes present");
  }
  const std::uint64_t expected_size = offset + 4 * count;
  if (bytes.size() < expected_size) {
    throw TensorFormatError(K::kTruncated, bytes.size(),
                            "expected " + std::to_string(expected_size) + " bytes, got " +
                                std::to_string(bytes.size()));
  }
  if (bytes.size() > expected_size) {
    throw TensorFormatError(K::kTrailingBytes, expected_size,
                            "expected " + std::to_string(expected_size) + " bytes, got " +
                                std::to_string(bytes.size()));
  }
  t.values.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t at = offset + 4 * i;
    const float v = std::bit_cast<float>(detail::get_u32(bytes, at));
    if (!std::isfinite(v)) {
      throw TensorFormatError(K::kNonFinite, at, "element " + std::to_string(i));
    }
    t.values[i] = v;
  }
  return t;
}

inline void write_tensor(const std::filesystem::path& path, const Tensor& tensor) {
  detail::write_file_bytes(path, encode_tensor(tensor));
}

/// Stores a matrix as a rank-2 tensor (values rounded to float32).
inline void write_tensor(const std::filesystem::path& path, const Matrix& matrix) {
  Tensor t;
  t.dims = {static_cast<std::uint32_t>(matrix.rows()), static_cast<std::uint32_t>(matrix.cols())};
  t.values.reserve(matrix.values().size());
  for (double v : matrix.values()) t.values.push_back(static_cast<float>(v));
  write_tensor(path, t);
}

inline Tensor read_tensor(const std::filesystem::path& path) {
  const std::vector<unsigned char> bytes = detail::read_file_bytes(path);
  try {
    return decode_tensor(bytes);
  } catch (const TensorFormatError& e) {
    throw TensorFormatError(e.kind(), e.offset(), path.string() + ": " + e.detail());
  }
}

inline std::vector<std::uint32_t> read_tensor_dims(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<unsigned char> head(7 + 4 * kMaxTensorRank);
  in.read(reinterpret_cast<char*>(head.data()), static_cast<std::streamsize>(head.size()));
  head.resize(static_cast<std::size_t>(in.gcount()));
  try {
    return decode_tensor_header(head);
  } catch (const TensorFormatError& e) {
    throw TensorFormatError(e.kind(), e.offset(), path.string() + ": " + e.detail());
  }
}

/// Rank-2 tensor as a double matrix.
inline Matrix to_matrix(const Tensor& t) {
  if (t.dims.size() != 2) {
    throw UsageError("expected a rank-2 tensor, got rank " + std::to_string(t.dims.size()));
  }
  std::vector<double> data(t.values.begin(), t.values.end());
  return Matrix(t.dims[0], t.dims[1], std::move(data));
}

}  // namespace tiger
