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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace segloss {

/// Voxels per axis, (x, y, z).
using Dims = std::array<std::size_t, 3>;
/// Physical voxel size in mm per axis.
using Spacing = std::array<double, 3>;
/// Integer voxel coordinate (x, y, z).
using Index3 = std::array<std::int64_t, 3>;

inline constexpr double kDefaultThreshold = 0.5;

/// Shape shared by every grid type. Storage is x-fastest:
/// index = x + dims[0] * (y + dims[1] * z).
struct Geometry {
  Dims dims{1, 1, 1};
  Spacing spacing{1.0, 1.0, 1.0};

  std::size_t voxel_count() const noexcept { return dims[0] * dims[1] * dims[2]; }

  std::size_t index(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return x + dims[0] * (y + dims[1] * z);
  }

  Index3 coord(std::size_t index) const noexcept {
    const auto x = index % dims[0];
    const auto rest = index / dims[0];
    return {static_cast<std::int64_t>(x), static_cast<std::int64_t>(rest % dims[1]),
            static_cast<std::int64_t>(rest / dims[1])};
  }

  bool contains(const Index3& c) const noexcept {
    for (int a = 0; a < 3; ++a) {
      if (c[a] < 0 || c[a] >= static_cast<std::int64_t>(dims[a])) return false;
    }
    return true;
  }

  friend bool operator==(const Geometry&, const Geometry&) = default;
};

/// Throws DimensionMismatch / NonPositiveSpacing for malformed geometry.
void validate_geometry(const Geometry& geometry, std::size_t data_length);

/// Dense immutable 3D field of finite reals.
class VoxelGrid {
 public:
  VoxelGrid(Dims dims, Spacing spacing, std::vector<double> data);
  VoxelGrid(const Geometry& geometry, std::vector<double> data)
      : VoxelGrid(geometry.dims, geometry.spacing, std::move(data)) {}

  const Geometry& geometry() const noexcept { return geometry_; }
  const Dims& dims() const noexcept { return geometry_.dims; }
  const Spacing& spacing() const noexcept { return geometry_.spacing; }
  std::size_t size() const noexcept { return data_.size(); }
  std::span<const double> data() const noexcept { return data_; }

  double operator[](std::size_t i) const noexcept { return data_[i]; }
  double at(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return data_[geometry_.index(x, y, z)];
  }

 private:
  Geometry geometry_;
  std::vector<double> data_;
};

/// Convenience spelling of the VoxelGrid constructor.
inline VoxelGrid new_grid(Dims dims, Spacing spacing, std::vector<double> data) {
  return VoxelGrid(dims, spacing, std::move(data));
}

/// Grid of {0,1} labels.
class BinaryMask {
 public:
  BinaryMask(Dims dims, Spacing spacing, std::vector<std::uint8_t> data);
  BinaryMask(const Geometry& geometry, std::vector<std::uint8_t> data)
      : BinaryMask(geometry.dims, geometry.spacing, std::move(data)) {}

  /// Accepts a grid whose values are exactly 0.0 or 1.0 (ValueOutOfRange otherwise).
  static BinaryMask from_grid(const VoxelGrid& grid);

  const Geometry& geometry() const noexcept { return geometry_; }
  const Dims& dims() const noexcept { return geometry_.dims; }
  const Spacing& spacing() const noexcept { return geometry_.spacing; }
  std::size_t size() const noexcept { return data_.size(); }
  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::uint8_t operator[](std::size_t i) const noexcept { return data_[i]; }

  std::size_t count() const noexcept;
  bool empty_foreground() const noexcept { return count() == 0; }

  VoxelGrid to_grid() const;

 private:
  Geometry geometry_;
  std::vector<std::uint8_t> data_;
};

/// VoxelGrid restricted to the closed interval [0, 1].
class ProbGrid {
 public:
  explicit ProbGrid(VoxelGrid grid);
  ProbGrid(Dims dims, Spacing spacing, std::vector<double> data)
      : ProbGrid(VoxelGrid(dims, spacing, std::move(data))) {}

  const VoxelGrid& grid() const noexcept { return grid_; }
  const Geometry& geometry() const noexcept { return grid_.geometry(); }
  const Dims& dims() const noexcept { return grid_.dims(); }
  std::size_t size() const noexcept { return grid_.size(); }
  std::span<const double> data() const noexcept { return grid_.data(); }
  double operator[](std::size_t i) const noexcept { return grid_[i]; }

 private:
  VoxelGrid grid_;
};

/// voxel = 1 iff p >= threshold. threshold must lie in (0, 1).
BinaryMask binarize(const ProbGrid& p, double threshold = kDefaultThreshold);

}  // namespace segloss
