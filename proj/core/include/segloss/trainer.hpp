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
#include <span>
#include <string>
#include <vector>

#include "segloss/loss_spec.hpp"
#include "segloss/metrics.hpp"
#include "segloss/optim.hpp"
#include "segloss/synth.hpp"
#include "segloss/volume.hpp"

namespace segloss {

/// Per-voxel features: baseline, follow-up, difference, 3x3x3 mean of the
/// difference (zero padded, always divided by 27), constant bias.
inline constexpr std::size_t kFeatureCount = 5;

struct FeatureVolume {
  Geometry geometry;
  std::vector<double> values;  // voxel-major, kFeatureCount per voxel

  std::span<const double> voxel(std::size_t i) const noexcept {
    return std::span<const double>(values).subspan(i * kFeatureCount, kFeatureCount);
  }
};

FeatureVolume featurize(const LongitudinalCase& c);

FeatureVolume crop_features(const FeatureVolume& features, const Index3& origin,
                            const Dims& patch_dims);

/// p = sigmoid(w . features(v)). Zero weights give p = 0.5 everywhere.
struct ToyModel {
  std::vector<double> weights = std::vector<double>(kFeatureCount, 0.0);
};

struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t iterations = 250;
  std::size_t batch_size = 4;
  OptimizerKind optimizer = OptimizerKind::Adam;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  Dims patch_dims{32, 32, 32};
  std::uint64_t seed = 0;
  ReportOptions report;

  void validate() const;
};

struct TrainHistory {
  std::vector<double> losses;  // one entry per completed iteration
  ToyModel model;
  std::vector<std::string> holdout_ids;
  std::vector<MetricReport> holdout_reports;
  bool diverged = false;
};

/// One training patch: features and labels over the same voxels.
struct Patch {
  FeatureVolume features;
  std::vector<std::uint8_t> labels;
};

/// Mean loss over the patches for the given weights; when `grad` is non-null
/// it receives dL/dw, back-propagated through the sigmoid and linear map.
double model_loss(std::span<const double> weights, const LossSpec& spec,
                  std::span<const Patch> patches, std::vector<double>* grad);

/// Iteration t draws batch_size (case, weighted crop) pairs from seeds derived
/// from (cfg.seed, t, slot), evaluates the mean loss, and takes one optimizer
/// step. Stops early with diverged = true on a non-finite loss.
TrainHistory train_toy(std::span<const LongitudinalCase> train, const LossSpec& spec,
                       const TrainConfig& cfg, std::span<const LongitudinalCase> heldout = {});

ProbGrid predict(const ToyModel& model, const FeatureVolume& features);
ProbGrid predict(const ToyModel& model, const LongitudinalCase& c);

}  // namespace segloss
