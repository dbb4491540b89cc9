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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "segloss/volume.hpp"

namespace segloss {

enum class Connectivity { Six = 6, TwentySix = 26 };

Connectivity parse_connectivity(int neighbours);

/// Foreground voxels with at least one background or out-of-bounds
/// neighbour. `extent` bounds every point; distances use `spacing`.
struct SurfacePointSet {
  std::vector<Index3> points;
  Spacing spacing{1.0, 1.0, 1.0};
  Dims extent{0, 0, 0};

  bool empty() const noexcept { return points.empty(); }

  /// Builds a set from explicit points; extent is the tight bounding box
  /// from the origin. Coordinates must be nonnegative.
  static SurfacePointSet from_points(std::vector<Index3> points, Spacing spacing);
};

/// Per-case metric row. hd/asd are absent when either surface is empty.
struct MetricReport {
  double dc = 0.0;
  double jc = 0.0;
  std::optional<double> hd;
  std::optional<double> asd;
  double voxel_pr = 0.0;
  double voxel_rc = 0.0;
  double voxel_f1 = 0.0;
  double lesion_pr = 0.0;
  double lesion_rc = 0.0;
  double lesion_f1 = 0.0;
};

struct OverlapMetrics {
  double dc = 0.0;
  double jc = 0.0;
  double pr = 0.0;
  double rc = 0.0;
  double f1 = 0.0;
};

struct LesionMetrics {
  double pr = 0.0;
  double rc = 0.0;
  double f1 = 0.0;
};

struct LabelGrid {
  Geometry geometry;
  std::vector<std::uint32_t> labels;  // 0 = background, components 1..count
  std::uint32_t count = 0;
};

struct ReportOptions {
  double threshold = kDefaultThreshold;
  double min_overlap = 0.1;
  Connectivity surface_connectivity = Connectivity::Six;
  Connectivity lesion_connectivity = Connectivity::TwentySix;
};

/// Both masks empty counts as a perfect match (every metric 1); otherwise
/// a ratio with an empty denominator is 0.
OverlapMetrics overlap_metrics(const BinaryMask& gt, const BinaryMask& pred);

SurfacePointSet surface_extract(const BinaryMask& mask,
                                Connectivity connectivity = Connectivity::Six);

/// Symmetric Hausdorff distance in mm. Throws EmptySurface.
double hausdorff(const SurfacePointSet& a, const SurfacePointSet& b);

/// Average symmetric surface distance in mm. Throws EmptySurface.
double asd(const SurfacePointSet& a, const SurfacePointSet& b);

/// Components are numbered 1..K in order of their smallest linear index.
LabelGrid connected_components(const BinaryMask& mask,
                               Connectivity connectivity = Connectivity::TwentySix);

/// A GT component is detected when one predicted component covers at least
/// min_overlap * |component| of its voxels. Predicted components touching no
/// GT voxel are false positives.
LesionMetrics lesion_detection_metrics(const BinaryMask& gt, const BinaryMask& pred,
                                       double min_overlap = 0.1,
                                       Connectivity connectivity = Connectivity::TwentySix);

MetricReport full_report(const BinaryMask& gt, const ProbGrid& pred_prob,
                         const ReportOptions& options = {});
MetricReport full_report(const BinaryMask& gt, const BinaryMask& pred,
                         const ReportOptions& options = {});

/// CSV columns: case_id, dc, jc, hd, asd, voxel_pr, voxel_rc, voxel_f1,
/// lesion_pr, lesion_rc, lesion_f1. Absent distances are empty fields.
std::string metric_csv_header();
std::string metric_csv_row(std::string_view case_id, const MetricReport& report);
/// Inverse of metric_csv_row on the fields after case_id.
MetricReport parse_metric_fields(const std::vector<std::string>& fields, std::size_t offset);

/// JSON object with the CSV keys; absent distances are null.
std::string metric_json(std::string_view case_id, const MetricReport& report);

}  // namespace segloss
