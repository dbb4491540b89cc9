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

#include "segloss/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <json.hpp>

#include "segloss/error.hpp"
#include "segloss/rng.hpp"
#include "segloss/volume_io.hpp"

namespace segloss {
namespace {

constexpr std::size_t kPlacementRetries = 1000;

struct Box {
  Index3 lo;
  Index3 hi;  // inclusive
};

// Boxes that are at least one voxel apart along some axis.
bool separated(const Box& a, const Box& b) {
  for (int k = 0; k < 3; ++k) {
    if (a.hi[k] + 1 < b.lo[k] || b.hi[k] + 1 < a.lo[k]) return true;
  }
  return false;
}

Box bounding_box(const Lesion& lesion, const Spacing& spacing) {
  Box box{{INT64_MAX, INT64_MAX, INT64_MAX}, {INT64_MIN, INT64_MIN, INT64_MIN}};
  for (const auto& e : lesion.parts) {
    for (int k = 0; k < 3; ++k) {
      const double half = e.radii_mm[k] / spacing[k];
      box.lo[k] = std::min(box.lo[k], static_cast<std::int64_t>(std::floor(e.center[k] - half)));
      box.hi[k] = std::max(box.hi[k], static_cast<std::int64_t>(std::ceil(e.center[k] + half)));
    }
  }
  return box;
}

bool inside(const Box& box, const Dims& dims) {
  for (int k = 0; k < 3; ++k) {
    if (box.lo[k] < 1 || box.hi[k] > static_cast<std::int64_t>(dims[k]) - 2) return false;
  }
  return true;
}

Lesion draw_lesion(const PhantomConfig& cfg, std::mt19937_64& rng, bool is_new) {
  std::uniform_real_distribution<double> radius(cfg.min_radius_mm, cfg.max_radius_mm);
  Lesion lesion;
  lesion.is_new = is_new;
  Ellipsoid main;
  for (int k = 0; k < 3; ++k) {
    main.radii_mm[k] = radius(rng);
    const double half = main.radii_mm[k] / cfg.spacing[k];
    std::uniform_real_distribution<double> centre(1.0 + half,
                                                  static_cast<double>(cfg.dims[k]) - 2.0 - half);
    main.center[k] = centre(rng);
  }
  lesion.parts.push_back(main);
  if (cfg.asymmetric_blobs) {
    // one or two satellites whose centres lie inside the main ellipsoid
    std::uniform_int_distribution<int> extra(1, 2);
    std::uniform_real_distribution<double> unit(-0.8, 0.8);
    std::uniform_real_distribution<double> shrink(0.5, 0.8);
    const int n = extra(rng);
    for (int s = 0; s < n; ++s) {
      Ellipsoid sat;
      for (int k = 0; k < 3; ++k) {
        sat.center[k] = main.center[k] + unit(rng) * main.radii_mm[k] / cfg.spacing[k];
        sat.radii_mm[k] = shrink(rng) * main.radii_mm[k];
      }
      lesion.parts.push_back(sat);
    }
  }
  return lesion;
}

std::vector<double> noise_field(std::size_t n, double sigma, std::uint64_t seed) {
  std::vector<double> out(n, 0.0);
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  for (auto& v : out) v = normal(rng);
  return out;
}

}  // namespace

void PhantomConfig::validate() const {
  for (int k = 0; k < 3; ++k) {
    if (dims[k] < 3) throw Error(ErrorCode::InvalidArgument, "phantom dims must be >= 3");
    if (!(spacing[k] > 0.0) || !std::isfinite(spacing[k])) {
      throw Error(ErrorCode::NonPositiveSpacing, "phantom spacing must be positive");
    }
  }
  if (!(min_radius_mm > 0.0) || !(max_radius_mm >= min_radius_mm) || !std::isfinite(max_radius_mm)) {
    throw Error(ErrorCode::InvalidArgument, "lesion radius range must be positive and ordered");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw Error(ErrorCode::InvalidArgument, "noise_sigma must be nonnegative");
  }
  if (!(lesion_intensity > 0.0) || !std::isfinite(lesion_intensity) ||
      !std::isfinite(background_level)) {
    throw Error(ErrorCode::InvalidArgument, "lesion_intensity must be positive");
  }
}

double lesion_profile(double d) noexcept {
  if (d > 1.0) return 0.0;
  if (d <= 0.6) return 1.0;
  return 0.7 + 0.3 * std::cos(std::numbers::pi * (d - 0.6) / 0.4);
}

double normalized_radius(const Ellipsoid& e, const Spacing& spacing, double x, double y,
                         double z) noexcept {
  const double p[3] = {x, y, z};
  double sum = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double t = (p[k] - e.center[k]) * spacing[k] / e.radii_mm[k];
    sum += t * t;
  }
  return std::sqrt(sum);
}

double lesion_contrast(const Lesion& lesion, const Spacing& spacing, double intensity, double x,
                       double y, double z) noexcept {
  double best = 0.0;
  for (const auto& e : lesion.parts) {
    best = std::max(best, lesion_profile(normalized_radius(e, spacing, x, y, z)));
  }
  return intensity * best;
}

LongitudinalCase gen_phantom(const PhantomConfig& cfg, std::uint64_t seed, std::string case_id) {
  cfg.validate();
  const Geometry geometry{cfg.dims, cfg.spacing};
  for (int k = 0; k < 3; ++k) {
    const auto span = 2 * static_cast<std::int64_t>(std::ceil(cfg.max_radius_mm / cfg.spacing[k])) + 3;
    if ((cfg.n_old_lesions + cfg.n_new_lesions) > 0 && span > static_cast<std::int64_t>(cfg.dims[k])) {
      throw Error(ErrorCode::LesionPlacementFailure, "largest lesion does not fit in the volume");
    }
  }

  std::mt19937_64 rng(derive_seed(seed, 0));
  std::vector<Lesion> lesions;
  std::vector<Box> boxes;
  const std::size_t total = cfg.n_old_lesions + cfg.n_new_lesions;
  for (std::size_t l = 0; l < total; ++l) {
    const bool is_new = l >= cfg.n_old_lesions;
    bool placed = false;
    for (std::size_t attempt = 0; attempt < kPlacementRetries && !placed; ++attempt) {
      auto lesion = draw_lesion(cfg, rng, is_new);
      const auto box = bounding_box(lesion, cfg.spacing);
      if (!inside(box, cfg.dims)) continue;
      if (!std::all_of(boxes.begin(), boxes.end(), [&](const Box& b) { return separated(b, box); })) {
        continue;
      }
      lesions.push_back(std::move(lesion));
      boxes.push_back(box);
      placed = true;
    }
    if (!placed) {
      throw Error(ErrorCode::LesionPlacementFailure,
                  "could not place lesion " + std::to_string(l + 1) + " of " + std::to_string(total));
    }
  }

  const std::size_t n = geometry.voxel_count();
  std::vector<double> base(n, cfg.background_level);
  std::vector<double> follow(n, cfg.background_level);
  std::vector<std::uint8_t> mask(n, 0);
  for (std::size_t li = 0; li < lesions.size(); ++li) {
    const auto& lesion = lesions[li];
    const auto& box = boxes[li];
    for (auto z = box.lo[2]; z <= box.hi[2]; ++z) {
      for (auto y = box.lo[1]; y <= box.hi[1]; ++y) {
        for (auto x = box.lo[0]; x <= box.hi[0]; ++x) {
          const double c = lesion_contrast(lesion, cfg.spacing, cfg.lesion_intensity,
                                           static_cast<double>(x), static_cast<double>(y),
                                           static_cast<double>(z));
          if (c <= 0.0) continue;
          const auto i = geometry.index(static_cast<std::size_t>(x), static_cast<std::size_t>(y),
                                        static_cast<std::size_t>(z));
          follow[i] += c;
          if (lesion.is_new) {
            mask[i] = 1;
          } else {
            base[i] += c;
          }
        }
      }
    }
  }

  const auto base_noise = noise_field(n, cfg.noise_sigma, derive_seed(seed, 1));
  const auto follow_noise = noise_field(n, cfg.noise_sigma, derive_seed(seed, 2));
  for (std::size_t i = 0; i < n; ++i) {
    base[i] += base_noise[i];
    follow[i] += follow_noise[i];
  }

  if (case_id.empty()) case_id = "phantom-" + std::to_string(seed);
  return LongitudinalCase{VoxelGrid(geometry, std::move(base)), VoxelGrid(geometry, std::move(follow)),
                          BinaryMask(geometry, std::move(mask)), std::move(case_id),
                          std::move(lesions)};
}

VoxelGrid difference_map(const LongitudinalCase& c) {
  const auto b = c.baseline.data();
  const auto f = c.followup.data();
  std::vector<double> out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = f[i] - b[i];
  return VoxelGrid(c.baseline.geometry(), std::move(out));
}

Index3 crop_origin(const BinaryMask& mask, const Dims& patch_dims, std::uint64_t seed) {
  const auto& dims = mask.dims();
  for (int k = 0; k < 3; ++k) {
    if (patch_dims[k] == 0 || patch_dims[k] > dims[k]) {
      throw Error(ErrorCode::PatchTooLarge, "patch dims must be positive and fit in the volume");
    }
  }
  std::mt19937_64 rng(seed);
  Index3 origin{};
  std::vector<std::size_t> foreground;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) foreground.push_back(i);
  }
  if (foreground.empty()) {
    for (int k = 0; k < 3; ++k) {
      std::uniform_int_distribution<std::int64_t> pick(0, static_cast<std::int64_t>(dims[k] - patch_dims[k]));
      origin[k] = pick(rng);
    }
    return origin;
  }
  std::uniform_int_distribution<std::size_t> pick(0, foreground.size() - 1);
  const auto centre = mask.geometry().coord(foreground[pick(rng)]);
  std::uniform_int_distribution<std::int64_t> shift(-kCropShift, kCropShift);
  for (int k = 0; k < 3; ++k) {
    const auto p = static_cast<std::int64_t>(patch_dims[k]);
    const auto hi = static_cast<std::int64_t>(dims[k]) - p;
    origin[k] = std::clamp(centre[k] + shift(rng) - p / 2, std::int64_t{0}, hi);
  }
  return origin;
}

std::vector<double> crop_values(std::span<const double> values, const Geometry& geometry,
                                const Index3& origin, const Dims& patch_dims) {
  for (int k = 0; k < 3; ++k) {
    if (origin[k] < 0 || static_cast<std::size_t>(origin[k]) + patch_dims[k] > geometry.dims[k]) {
      throw Error(ErrorCode::PatchTooLarge, "patch exceeds the volume");
    }
  }
  std::vector<double> out;
  out.reserve(patch_dims[0] * patch_dims[1] * patch_dims[2]);
  for (std::size_t z = 0; z < patch_dims[2]; ++z) {
    for (std::size_t y = 0; y < patch_dims[1]; ++y) {
      const auto row = geometry.index(static_cast<std::size_t>(origin[0]),
                                      static_cast<std::size_t>(origin[1]) + y,
                                      static_cast<std::size_t>(origin[2]) + z);
      out.insert(out.end(), values.begin() + static_cast<std::ptrdiff_t>(row),
                 values.begin() + static_cast<std::ptrdiff_t>(row + patch_dims[0]));
    }
  }
  return out;
}

LongitudinalCase crop_case(const LongitudinalCase& c, const Index3& origin, const Dims& patch_dims) {
  const auto& g = c.baseline.geometry();
  const Geometry pg{patch_dims, g.spacing};
  std::vector<double> mask_values(c.new_lesion_mask.data().begin(), c.new_lesion_mask.data().end());
  auto cropped_mask = crop_values(mask_values, g, origin, patch_dims);
  std::vector<std::uint8_t> labels(cropped_mask.begin(), cropped_mask.end());

  auto lesions = c.lesions;
  for (auto& lesion : lesions) {
    for (auto& e : lesion.parts) {
      for (int k = 0; k < 3; ++k) e.center[k] -= static_cast<double>(origin[k]);
    }
  }
  return LongitudinalCase{VoxelGrid(pg, crop_values(c.baseline.data(), g, origin, patch_dims)),
                          VoxelGrid(pg, crop_values(c.followup.data(), g, origin, patch_dims)),
                          BinaryMask(pg, std::move(labels)), c.case_id, std::move(lesions)};
}

LongitudinalCase weighted_crop(const LongitudinalCase& c, const Dims& patch_dims,
                               std::uint64_t seed) {
  return crop_case(c, crop_origin(c.new_lesion_mask, patch_dims, seed), patch_dims);
}

std::string phantom_config_json(const PhantomConfig& cfg) {
  nlohmann::ordered_json j;
  j["dims"] = cfg.dims;
  j["spacing"] = cfg.spacing;
  j["n_old_lesions"] = cfg.n_old_lesions;
  j["n_new_lesions"] = cfg.n_new_lesions;
  j["lesion_radius_range_mm"] = {cfg.min_radius_mm, cfg.max_radius_mm};
  j["lesion_intensity"] = cfg.lesion_intensity;
  j["noise_sigma"] = cfg.noise_sigma;
  j["background_level"] = cfg.background_level;
  j["asymmetric_blobs"] = cfg.asymmetric_blobs;
  return j.dump();
}

void write_case(const std::filesystem::path& dir, const LongitudinalCase& c,
                const PhantomConfig& cfg, std::uint64_t seed) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
  write_volume(c.baseline, dir / "baseline.segv");
  write_volume(c.followup, dir / "followup.segv");
  write_volume(c.new_lesion_mask, dir / "mask.segv");

  nlohmann::ordered_json j;
  j["case_id"] = c.case_id;
  j["seed"] = seed;
  j["config"] = nlohmann::ordered_json::parse(phantom_config_json(cfg));
  auto& lesions = j["lesions"] = nlohmann::ordered_json::array();
  for (const auto& lesion : c.lesions) {
    nlohmann::ordered_json l;
    l["new"] = lesion.is_new;
    for (const auto& e : lesion.parts) {
      l["parts"].push_back({{"center", e.center}, {"radii_mm", e.radii_mm}});
    }
    lesions.push_back(l);
  }
  std::ofstream out(dir / "case.json", std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + (dir / "case.json").string());
  out << j.dump(2) << '\n';
}

LongitudinalCase read_case(const std::filesystem::path& dir) {
  std::ifstream in(dir / "case.json");
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + (dir / "case.json").string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, (dir / "case.json").string() + ": " + e.what());
  }
  auto base = read_volume(dir / "baseline.segv");
  auto follow = read_volume(dir / "followup.segv");
  auto mask = read_mask(dir / "mask.segv");
  if (base.geometry() != follow.geometry() || base.geometry() != mask.geometry()) {
    throw Error(ErrorCode::ShapeMismatch, dir.string() + ": case volumes disagree in geometry");
  }
  std::vector<Lesion> lesions;
  for (const auto& l : j.value("lesions", nlohmann::json::array())) {
    Lesion lesion;
    lesion.is_new = l.value("new", false);
    for (const auto& p : l["parts"]) {
      lesion.parts.push_back({p["center"].get<std::array<double, 3>>(),
                              p["radii_mm"].get<std::array<double, 3>>()});
    }
    lesions.push_back(std::move(lesion));
  }
  return LongitudinalCase{std::move(base), std::move(follow), std::move(mask),
                          j.value("case_id", dir.filename().string()), std::move(lesions)};
}

}  // namespace segloss
