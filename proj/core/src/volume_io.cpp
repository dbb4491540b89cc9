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

#include "segloss/volume_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "segloss/error.hpp"

namespace segloss {
namespace {

constexpr std::byte kMagic[4] = {std::byte{'S'}, std::byte{'E'}, std::byte{'G'}, std::byte{'V'}};

void put_u32(std::vector<std::byte>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32(std::span<const std::byte> in, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::to_integer<std::uint32_t>(in[offset + i]) << (8 * i);
  return v;
}

void put_f32(std::vector<std::byte>& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

float get_f32(std::span<const std::byte> in, std::size_t offset) {
  return std::bit_cast<float>(get_u32(in, offset));
}

std::vector<std::byte> encode_header(const Geometry& g, VolumeDtype dtype) {
  std::vector<std::byte> out;
  out.reserve(kSegvHeaderSize + g.voxel_count() * (dtype == VolumeDtype::Float32 ? 4 : 1));
  for (auto b : kMagic) out.push_back(b);
  out.push_back(std::byte{kSegvVersion});
  out.push_back(static_cast<std::byte>(dtype));
  out.push_back(std::byte{0});
  out.push_back(std::byte{0});
  for (auto d : g.dims) {
    if (d > std::numeric_limits<std::uint32_t>::max()) {
      throw Error(ErrorCode::DimensionMismatch, "dimension exceeds 32-bit range");
    }
    put_u32(out, static_cast<std::uint32_t>(d));
  }
  for (auto s : g.spacing) put_f32(out, static_cast<float>(s));
  return out;
}

std::size_t dtype_width(VolumeDtype dtype) { return dtype == VolumeDtype::Float32 ? 4 : 1; }

void write_bytes(const std::vector<std::byte>& bytes, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

std::vector<std::byte> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read failed for " + path.string());
  std::vector<std::byte> bytes(raw.size());
  std::memcpy(bytes.data(), raw.data(), raw.size());
  return bytes;
}

}  // namespace

std::vector<std::byte> encode_volume(const VoxelGrid& grid) {
  auto out = encode_header(grid.geometry(), VolumeDtype::Float32);
  for (double v : grid.data()) put_f32(out, static_cast<float>(v));
  return out;
}

std::vector<std::byte> encode_volume(const BinaryMask& mask) {
  auto out = encode_header(mask.geometry(), VolumeDtype::UInt8);
  for (auto v : mask.data()) out.push_back(static_cast<std::byte>(v));
  return out;
}

VolumeHeader decode_header(std::span<const std::byte> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::BadMagic, "missing SEGV magic");
  }
  if (bytes.size() < kSegvHeaderSize) {
    throw Error(ErrorCode::TruncatedPayload, "header shorter than 32 bytes");
  }
  const auto version = std::to_integer<std::uint8_t>(bytes[4]);
  if (version != kSegvVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "version " + std::to_string(version));
  }
  const auto dtype = std::to_integer<std::uint8_t>(bytes[5]);
  if (dtype > 1) throw Error(ErrorCode::UnsupportedDtype, "dtype code " + std::to_string(dtype));

  VolumeHeader header;
  header.dtype = static_cast<VolumeDtype>(dtype);
  for (int a = 0; a < 3; ++a) {
    header.geometry.dims[a] = get_u32(bytes, 8 + 4 * a);
    header.geometry.spacing[a] = static_cast<double>(get_f32(bytes, 20 + 4 * a));
  }
  validate_geometry(header.geometry, header.geometry.voxel_count());
  return header;
}

VoxelGrid decode_volume(std::span<const std::byte> bytes) {
  const auto header = decode_header(bytes);
  const auto n = header.geometry.voxel_count();
  const auto width = dtype_width(header.dtype);
  const auto payload = bytes.size() - kSegvHeaderSize;
  if (payload < n * width) {
    throw Error(ErrorCode::TruncatedPayload, "expected " + std::to_string(n) + " values, found " +
                                                 std::to_string(payload / width));
  }
  if (payload > n * width) {
    throw Error(ErrorCode::TrailingData,
                std::to_string(payload - n * width) + " bytes after payload");
  }
  std::vector<double> data(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto off = kSegvHeaderSize + i * width;
    data[i] = header.dtype == VolumeDtype::Float32
                  ? static_cast<double>(get_f32(bytes, off))
                  : static_cast<double>(std::to_integer<std::uint8_t>(bytes[off]));
  }
  return VoxelGrid(header.geometry, std::move(data));
}

void write_volume(const VoxelGrid& grid, const std::filesystem::path& path) {
  write_bytes(encode_volume(grid), path);
}

void write_volume(const BinaryMask& mask, const std::filesystem::path& path) {
  write_bytes(encode_volume(mask), path);
}

VoxelGrid read_volume(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  try {
    return decode_volume(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

BinaryMask read_mask(const std::filesystem::path& path) {
  const auto grid = read_volume(path);
  try {
    return BinaryMask::from_grid(grid);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

}  // namespace segloss
