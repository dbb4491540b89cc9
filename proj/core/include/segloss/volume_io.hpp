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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "segloss/volume.hpp"

namespace segloss {

// SEGV volume file, little-endian:
//   [0, 4)   magic "SEGV"
//   [4]      version (1)
//   [5]      dtype (0 = float32, 1 = uint8 label)
//   [6, 8)   reserved, zero
//   [8, 20)  dims, 3 x uint32
//   [20, 32) spacing in mm, 3 x float32
//   [32, ..) payload, x-fastest
inline constexpr std::uint8_t kSegvVersion = 1;
inline constexpr std::size_t kSegvHeaderSize = 32;

enum class VolumeDtype : std::uint8_t { Float32 = 0, UInt8 = 1 };

struct VolumeHeader {
  VolumeDtype dtype = VolumeDtype::Float32;
  Geometry geometry;
};

/// Grid values and spacing are narrowed to float32; values already
/// representable in float32 survive a round trip bit-exactly.
std::vector<std::byte> encode_volume(const VoxelGrid& grid);
std::vector<std::byte> encode_volume(const BinaryMask& mask);

VolumeHeader decode_header(std::span<const std::byte> bytes);
VoxelGrid decode_volume(std::span<const std::byte> bytes);

void write_volume(const VoxelGrid& grid, const std::filesystem::path& path);
void write_volume(const BinaryMask& mask, const std::filesystem::path& path);
VoxelGrid read_volume(const std::filesystem::path& path);

/// Reads a volume and requires binary {0,1} content.
BinaryMask read_mask(const std::filesystem::path& path);

}  // namespace segloss
