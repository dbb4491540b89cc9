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
#include <filesystem>
#include <string>
#include <vector>

#include "segloss/volume.hpp"

namespace segloss {

/// Maximum per-axis shift (voxels) applied to a foreground-centred patch.
inline constexpr std::int64_t kCropShift = 10;

/// Axis-aligned ellipsoid; centre in voxel coordinates, radii in mm.
struct Ellipsoid {
  std::array<double, 3> center{};
  std::array<double, 3> radii_mm{};
};

/// One lesion: a single ellipsoid, or a union of overlapping ellipsoids in
/// asymmetric-blob mode.
struct Lesion {
  std::vector<Ellipsoid> parts;
  bool is_new = false;
};

struct PhantomConfig {
  Dims dims{48, 48, 48};
  Spacing spacing{0.5, 0.75, 0.75};
  std::size_t n_old_lesions = 3;
  std::size_t n_new_lesions = 2;
  double min_radius_mm = 1.5;
  double max_radius_mm = 3.0;
  double lesion_intensity = 0.6;
  double noise_sigma = 0.05;
  double background_level = 0.3;
  bool asymmetric_blobs = false;

  void validate() const;
};

/// Baseline and follow-up scans plus the new-lesion ground truth.
struct LongitudinalCase {
  VoxelGrid baseline;
  VoxelGrid followup;
  BinaryMask new_lesion_mask;
  std::string case_id;
  std::vector<Lesion> lesions;  // placement record, voxel coords of this case
};

/// Intensity profile of a lesion at normalised ellipsoid radius d: flat core,
/// cosine ramp from 1 down to 0.4 over d in (0.6, 1], zero outside.
double lesion_profile(double normalized_radius) noexcept;

/// Normalised radius of voxel (x, y, z) w.r.t. an ellipsoid.
double normalized_radius(const Ellipsoid& e, const Spacing& spacing, double x, double y,
                         double z) noexcept;

/// Contrast contributed by a lesion at a voxel (max over its parts).
double lesion_contrast(const Lesion& lesion, const Spacing& spacing, double intensity, double x,
                       double y, double z) noexcept;

/// Deterministic for (cfg, seed). Old lesions appear in both scans, new ones
/// only in the follow-up. Lesions are placed with a one-voxel gap between
/// bounding boxes. Throws LesionPlacementFailure when they cannot be fitted.
LongitudinalCase gen_phantom(const PhantomConfig& cfg, std::uint64_t seed,
                             std::string case_id = {});

/// Follow-up minus baseline.
VoxelGrid difference_map(const LongitudinalCase& c);

/// Origin of a weighted crop. With foreground present: a uniformly chosen
/// foreground voxel, shifted by an independent uniform offset in
/// [-kCropShift, kCropShift] per axis, becomes the patch centre; the patch is
/// then clamped into the volume. Without foreground the origin is uniform.
Index3 crop_origin(const BinaryMask& mask, const Dims& patch_dims, std::uint64_t seed);

LongitudinalCase crop_case(const LongitudinalCase& c, const Index3& origin, const Dims& patch_dims);

LongitudinalCase weighted_crop(const LongitudinalCase& c, const Dims& patch_dims,
                               std::uint64_t seed);

/// Crops an arbitrary grid / mask (used by the trainer for feature volumes).
std::vector<double> crop_values(std::span<const double> values, const Geometry& geometry,
                                const Index3& origin, const Dims& patch_dims);

/// baseline.segv, followup.segv, mask.segv and case.json (config + seed).
void write_case(const std::filesystem::path& dir, const LongitudinalCase& c,
                const PhantomConfig& cfg, std::uint64_t seed);
LongitudinalCase read_case(const std::filesystem::path& dir);

std::string phantom_config_json(const PhantomConfig& cfg);

}  // namespace segloss
