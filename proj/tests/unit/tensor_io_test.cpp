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

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <vector>

#include "test_support.hpp"
#include "tiger/tensor_io.hpp"

namespace tiger {
namespace {

using Bytes = std::vector<unsigned char>;

Bytes sample_bytes() { return encode_tensor({{2, 3}, {1, 2, 3, 4, 5, 6}}); }

TensorErrorKind kind_of(const Bytes& bytes, std::uint64_t* offset = nullptr) {
  try {
    decode_tensor(bytes);
  } catch (const TensorFormatError& e) {
    if (offset != nullptr) *offset = e.offset();
    return e.kind();
  }
  ADD_FAILURE() << "decoded without error";
  return TensorErrorKind::kBadMagic;
}

TEST(Tfv1, HeaderLayout) {
  const Bytes b = sample_bytes();
  ASSERT_EQ(b.size(), 4u + 2 + 1 + 2 * 4 + 6 * 4);
  EXPECT_EQ(std::memcmp(b.data(), "TFV1", 4), 0);
  EXPECT_EQ(b[4], 1);
  EXPECT_EQ(b[5], 0);
  EXPECT_EQ(b[6], 2);
  EXPECT_EQ(b[7], 2);
  EXPECT_EQ(b[11], 3);
  float first;
  std::memcpy(&first, b.data() + 15, 4);
  EXPECT_EQ(first, 1.0f);
}

TEST(Tfv1, RoundTripRandom) {
  std::mt19937_64 rng(91);
  for (int trial = 0; trial < 200; ++trial) {
    Tensor t;
    const std::size_t rank = testing::uniform_size(rng, 1, 4);
    std::uint64_t count = 1;
    for (std::size_t r = 0; r < rank; ++r) {
      t.dims.push_back(static_cast<std::uint32_t>(testing::uniform_size(rng, 1, 6)));
      count *= t.dims.back();
    }
    for (std::uint64_t k = 0; k < count; ++k) {
      t.values.push_back(static_cast<float>(testing::uniform_real(rng, -1e6, 1e6)));
    }
    const Tensor back = decode_tensor(encode_tensor(t));
    EXPECT_EQ(back.dims, t.dims);
    EXPECT_EQ(back.values, t.values);
  }
}

TEST(Tfv1, SpecialValuesPreserved) {
  const float denorm = std::numeric_limits<float>::denorm_min();
  const Tensor t{{4}, {-0.0f, denorm, std::numeric_limits<float>::max(), -1.5f}};
  const Tensor back = decode_tensor(encode_tensor(t));
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(std::bit_cast<std::uint32_t>(back.values[i]),
              std::bit_cast<std::uint32_t>(t.values[i]));
  }
}

TEST(Tfv1, EncodeRejectsInvalid) {
  EXPECT_THROW(encode_tensor({{}, {}}), UsageError);
  EXPECT_THROW(encode_tensor({{0}, {}}), UsageError);
  EXPECT_THROW(encode_tensor({{2}, {1.0f}}), UsageError);
  EXPECT_THROW(encode_tensor({{1}, {NAN}}), DomainError);
}

TEST(Tfv1, BadMagic) {
  Bytes b = sample_bytes();
  b[0] = 'X';
  EXPECT_EQ(kind_of(b), TensorErrorKind::kBadMagic);
}

TEST(Tfv1, UnsupportedVersion) {
  Bytes b = sample_bytes();
  b[4] = 2;
  std::uint64_t offset = 0;
  EXPECT_EQ(kind_of(b, &offset), TensorErrorKind::kUnsupportedVersion);
  EXPECT_EQ(offset, 4u);
}

TEST(Tfv1, BadRank) {
  Bytes b = sample_bytes();
  b[6] = 0;
  EXPECT_EQ(kind_of(b), TensorErrorKind::kBadRank);
  b[6] = 9;
  EXPECT_EQ(kind_of(b), TensorErrorKind::kBadRank);
}

TEST(Tfv1, ZeroDim) {
  Bytes b = sample_bytes();
  b[11] = 0;
  std::uint64_t offset = 0;
  EXPECT_EQ(kind_of(b, &offset), TensorErrorKind::kZeroDim);
  EXPECT_EQ(offset, 11u);
}

TEST(Tfv1, Truncated) {
  const Bytes full = sample_bytes();
  for (std::size_t len : {0u, 3u, 5u, 10u, 20u, 38u}) {
    const Bytes b(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(len));
    EXPECT_EQ(kind_of(b), TensorErrorKind::kTruncated) << len;
  }
}

TEST(Tfv1, HugeDimsAreTruncatedNotOverflow) {
  Bytes b = encode_tensor({{1, 1}, {1.0f}});
  for (std::size_t k = 7; k < 15; ++k) b[k] = 0xff;
  EXPECT_EQ(kind_of(b), TensorErrorKind::kTruncated);
}

TEST(Tfv1, TrailingBytes) {
  Bytes b = sample_bytes();
  b.push_back(0);
  std::uint64_t offset = 0;
  EXPECT_EQ(kind_of(b, &offset), TensorErrorKind::kTrailingBytes);
  EXPECT_EQ(offset, b.size() - 1);
}

TEST(Tfv1, NonFinite) {
  Bytes b = sample_bytes();
  const auto inf = std::bit_cast<std::uint32_t>(std::numeric_limits<float>::infinity());
  std::memcpy(b.data() + 15 + 8, &inf, 4);
  std::uint64_t offset = 0;
  EXPECT_EQ(kind_of(b, &offset), TensorErrorKind::kNonFinite);
  EXPECT_EQ(offset, 23u);
}

TEST(Tfv1, FileRoundTripAndMatrix) {
  testing::TempDir dir;
  const Matrix m(2, 2, std::vector<double>{0.5, -1.0, 2.0, 0.25});
  write_tensor(dir / "m.tfv", m);
  EXPECT_EQ(read_tensor_dims(dir / "m.tfv"), (std::vector<std::uint32_t>{2, 2}));
  EXPECT_EQ(to_matrix(read_tensor(dir / "m.tfv")), m);
  EXPECT_THROW(to_matrix(Tensor{{4}, {1, 2, 3, 4}}), UsageError);
  EXPECT_THROW(read_tensor(dir / "missing.tfv"), IoError);
}

TEST(Tfv1, FileErrorsNamePath) {
  testing::TempDir dir;
  Bytes b = sample_bytes();
  b[0] = 'Q';
  detail::write_file_bytes(dir / "bad.tfv", b);
  try {
    read_tensor(dir / "bad.tfv");
    FAIL();
  } catch (const TensorFormatError& e) {
    EXPECT_EQ(e.kind(), TensorErrorKind::kBadMagic);
    EXPECT_NE(std::string(e.what()).find("bad.tfv"), std::string::npos);
  }
}

}  // namespace
}  // namespace tiger
