/*
   Copyright 2026 The segloss Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

      http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "segloss/error.hpp"
#include "segloss/volume.hpp"
#include "segloss/volume_io.hpp"
#include "test_util.hpp"

namespace segloss {
namespace {

namespace fs = std::filesystem;

using testing::code_of;

fs::path temp_file(const std::string& name) {
  static const auto dir = testing::scratch_dir("volume");
  return dir / name;
}

void write_bytes(const fs::path& path, const std::vector<std::byte>& bytes) {
  std::ofstream f(path, std::ios::binary);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

TEST(VoxelGrid, MinimalConstruction) {
  auto g = new_grid({2, 1, 1}, {1, 1, 1}, {0.0, 1.0});
  EXPECT_EQ(g.size(), 2u);
  EXPECT_EQ(g[1], 1.0);
}

TEST(VoxelGrid, TargetSpacing) {
  auto g = new_grid({3, 3, 3}, {0.5, 0.75, 0.75}, std::vector<double>(27, 0.25));
  EXPECT_EQ(g.spacing()[0], 0.5);
  EXPECT_EQ(g.spacing()[2], 0.75);
  EXPECT_EQ(g.at(2, 2, 2), 0.25);
}

TEST(VoxelGrid, RejectsMalformedInput) {
  EXPECT_EQ(code_of([] { new_grid({2, 2, 2}, {1, 1, 1}, std::vector<double>(7)); }),
            ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([] { new_grid({0, 2, 2}, {1, 1, 1}, {}); }), ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([] { new_grid({1, 1, 1}, {1, 0, 1}, {0.0}); }), ErrorCode::NonPositiveSpacing);
  EXPECT_EQ(code_of([] { new_grid({1, 1, 1}, {1, -1, 1}, {0.0}); }), ErrorCode::NonPositiveSpacing);
  EXPECT_EQ(code_of([] {
              new_grid({1, 1, 1}, {1, std::numeric_limits<double>::infinity(), 1}, {0.0});
            }),
            ErrorCode::NonPositiveSpacing);
  EXPECT_EQ(code_of([] { new_grid({1, 1, 1}, {1, 1, 1}, {std::nan("")}); }),
            ErrorCode::NonFiniteData);
  EXPECT_EQ(code_of([] { BinaryMask({2, 1, 1}, {1, 1, 1}, {0, 2}); }), ErrorCode::ValueOutOfRange);
  EXPECT_EQ(code_of([] { ProbGrid({2, 1, 1}, {1, 1, 1}, {0.0, 1.5}); }),
            ErrorCode::ValueOutOfRange);
}

TEST(VoxelGrid, XFastestLayout) {
  Geometry g{{2, 3, 4}, {1, 1, 1}};
  EXPECT_EQ(g.index(1, 2, 3), 1u + 2u * (2u + 3u * 3u));
  EXPECT_EQ(g.coord(g.index(1, 2, 3)), (Index3{1, 2, 3}));
}

TEST(Binarize, InclusiveThreshold) {
  auto m = binarize(ProbGrid({3, 1, 1}, {1, 1, 1}, {0.2, 0.5, 0.9}));
  EXPECT_EQ(m[0], 0);
  EXPECT_EQ(m[1], 1);
  EXPECT_EQ(m[2], 1);

  auto z = binarize(ProbGrid({4, 1, 1}, {1, 1, 1}, std::vector<double>(4, 0.0)));
  EXPECT_EQ(z.count(), 0u);

  auto b = binarize(ProbGrid({2, 1, 1}, {1, 1, 1}, {0.49999, 0.50001}));
  EXPECT_EQ(b[0], 0);
  EXPECT_EQ(b[1], 1);
}

TEST(Binarize, ThresholdRange) {
  ProbGrid p({1, 1, 1}, {1, 1, 1}, {0.5});
  EXPECT_EQ(code_of([&] { binarize(p, 0.0); }), ErrorCode::ThresholdOutOfRange);
  EXPECT_EQ(code_of([&] { binarize(p, 1.0); }), ErrorCode::ThresholdOutOfRange);
}

TEST(Binarize, CountsMatch) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> v(60);
    for (auto& x : v) x = u(rng);
    const double thr = 0.05 + 0.9 * u(rng);
    auto m = binarize(ProbGrid({3, 4, 5}, {0.5, 1, 2}, v), thr);
    std::size_t expected = 0;
    for (double x : v) expected += x >= thr;
    EXPECT_EQ(m.count(), expected);
    EXPECT_EQ(m.geometry(), (Geometry{{3, 4, 5}, {0.5, 1, 2}}));
  }
}

TEST(VolumeIo, RoundTripProperty) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> dim(1, 9);
  std::uniform_real_distribution<float> val(-100.0f, 100.0f);
  std::uniform_real_distribution<float> sp(0.1f, 3.0f);
  const auto path = temp_file("rt.segv");
  for (int t = 0; t < 30; ++t) {
    Dims d{dim(rng), dim(rng), dim(rng)};
    Spacing s{sp(rng), sp(rng), sp(rng)};
    std::vector<double> v(d[0] * d[1] * d[2]);
    for (auto& x : v) x = val(rng);
    VoxelGrid g(d, s, v);
    write_volume(g, path);
    auto back = read_volume(path);
    EXPECT_EQ(back.geometry(), g.geometry());
    ASSERT_EQ(back.size(), g.size());
    EXPECT_EQ(std::memcmp(back.data().data(), g.data().data(), g.size() * sizeof(double)), 0);
  }
}

TEST(VolumeIo, MaskRoundTrip) {
  BinaryMask m({2, 2, 1}, {0.5, 0.75, 0.75}, {1, 0, 0, 1});
  const auto path = temp_file("mask.segv");
  write_volume(m, path);
  EXPECT_EQ(decode_header(encode_volume(m)).dtype, VolumeDtype::UInt8);
  auto back = read_mask(path);
  EXPECT_EQ(back.geometry(), m.geometry());
  EXPECT_TRUE(std::equal(back.data().begin(), back.data().end(), m.data().begin()));
}

TEST(VolumeIo, HeaderLayout) {
  auto bytes = encode_volume(new_grid({2, 1, 1}, {0.5, 1, 1}, {1.0, 2.0}));
  ASSERT_EQ(bytes.size(), kSegvHeaderSize + 2 * 4);
  EXPECT_EQ(std::memcmp(bytes.data(), "SEGV", 4), 0);
  EXPECT_EQ(std::to_integer<int>(bytes[4]), 1);
  EXPECT_EQ(std::to_integer<int>(bytes[5]), 0);
  EXPECT_EQ(std::to_integer<int>(bytes[8]), 2);
  float sx;
  std::memcpy(&sx, bytes.data() + 20, 4);
  EXPECT_EQ(sx, 0.5f);
  float v1;
  std::memcpy(&v1, bytes.data() + 36, 4);
  EXPECT_EQ(v1, 2.0f);
}

TEST(VolumeIo, MalformedFiles) {
  auto good = encode_volume(new_grid({2, 2, 2}, {1, 1, 1}, std::vector<double>(8, 1.0)));

  auto bad_magic = good;
  std::memcpy(bad_magic.data(), "XXXX", 4);
  EXPECT_EQ(code_of([&] { decode_volume(bad_magic); }), ErrorCode::BadMagic);

  auto truncated = good;
  truncated.resize(truncated.size() - 4);  // 7 payload values
  EXPECT_EQ(code_of([&] { decode_volume(truncated); }), ErrorCode::TruncatedPayload);

  auto trailing = good;
  trailing.push_back(std::byte{0});
  EXPECT_EQ(code_of([&] { decode_volume(trailing); }), ErrorCode::TrailingData);

  auto version = good;
  version[4] = std::byte{9};
  EXPECT_EQ(code_of([&] { decode_volume(version); }), ErrorCode::UnsupportedVersion);

  auto short_header = good;
  short_header.resize(12);
  EXPECT_EQ(code_of([&] { decode_volume(short_header); }), ErrorCode::TruncatedPayload);

  const auto path = temp_file("bad.segv");
  write_bytes(path, bad_magic);
  try {
    read_volume(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadMagic);
    EXPECT_TRUE(e.is_io());
    EXPECT_NE(std::string(e.what()).find("bad.segv"), std::string::npos);
  }
  EXPECT_EQ(code_of([] { read_volume(temp_file("missing.segv")); }), ErrorCode::IoFailure);
}

TEST(VolumeIo, ReadMaskRejectsNonBinary) {
  const auto path = temp_file("nonbinary.segv");
  write_volume(new_grid({2, 1, 1}, {1, 1, 1}, {0.0, 0.5}), path);
  EXPECT_EQ(code_of([&] { read_mask(path); }), ErrorCode::ValueOutOfRange);
}

}  // namespace
}  // namespace segloss
