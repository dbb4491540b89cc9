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

#include "segloss/volume.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "segloss/error.hpp"

namespace segloss {

void validate_geometry(const Geometry& geometry, std::size_t data_length) {
  for (int a = 0; a < 3; ++a) {
    if (geometry.dims[a] == 0) {
      throw Error(ErrorCode::DimensionMismatch,
                  "dimension " + std::to_string(a) + " must be positive");
    }
    const double s = geometry.spacing[a];
    if (!std::isfinite(s) || s <= 0.0) {
      throw Error(ErrorCode::NonPositiveSpacing,
                  "spacing component " + std::to_string(a) + " must be positive and finite");
    }
  }
  if (data_length != geometry.voxel_count()) {
    throw Error(ErrorCode::DimensionMismatch,
                "data length " + std::to_string(data_length) + " does not match " +
                    std::to_string(geometry.dims[0]) + "x" + std::to_string(geometry.dims[1]) +
                    "x" + std::to_string(geometry.dims[2]));
  }
}

VoxelGrid::VoxelGrid(Dims dims, Spacing spacing, std::vector<double> data)
    : geometry_{dims, spacing}, data_(std::move(data)) {
  validate_geometry(geometry_, data_.size());
  const auto bad = std::find_if(data_.begin(), data_.end(), [](double v) { return !std::isfinite(v); });
  if (bad != data_.end()) {
    throw Error(ErrorCode::NonFiniteData,
                "non-finite value at index " + std::to_string(bad - data_.begin()));
  }
}

BinaryMask::BinaryMask(Dims dims, Spacing spacing, std::vector<std::uint8_t> data)
    : geometry_{dims, spacing}, data_(std::move(data)) {
  validate_geometry(geometry_, data_.size());
  const auto bad = std::find_if(data_.begin(), data_.end(), [](std::uint8_t v) { return v > 1; });
  if (bad != data_.end()) {
    throw Error(ErrorCode::ValueOutOfRange,
                "mask label at index " + std::to_string(bad - data_.begin()) + " is not 0 or 1");
  }
}

BinaryMask BinaryMask::from_grid(const VoxelGrid& grid) {
  std::vector<std::uint8_t> labels(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = grid[i];
    if (v != 0.0 && v != 1.0) {
      throw Error(ErrorCode::ValueOutOfRange,
                  "value at index " + std::to_string(i) + " is not a binary label");
    }
    labels[i] = v == 1.0 ? 1 : 0;
  }
  return BinaryMask(grid.geometry(), std::move(labels));
}

std::size_t BinaryMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

VoxelGrid BinaryMask::to_grid() const {
  return VoxelGrid(geometry_, std::vector<double>(data_.begin(), data_.end()));
}

ProbGrid::ProbGrid(VoxelGrid grid) : grid_(std::move(grid)) {
  const auto d = grid_.data();
  const auto bad = std::find_if(d.begin(), d.end(), [](double v) { return v < 0.0 || v > 1.0; });
  if (bad != d.end()) {
    throw Error(ErrorCode::ValueOutOfRange,
                "probability at index " + std::to_string(bad - d.begin()) + " outside [0, 1]");
  }
}

BinaryMask binarize(const ProbGrid& p, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::ThresholdOutOfRange, "threshold must lie in (0, 1)");
  }
  std::vector<std::uint8_t> labels(p.size());
  std::transform(p.data().begin(), p.data().end(), labels.begin(),
                 [threshold](double v) { return static_cast<std::uint8_t>(v >= threshold); });
  return BinaryMask(p.geometry(), std::move(labels));
}

}  // namespace segloss
