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

#include "segloss/trainer.hpp"

#include <cmath>
#include <memory>
#include <random>

#include "segloss/error.hpp"
#include "segloss/losses.hpp"
#include "segloss/rng.hpp"

namespace segloss {
namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double dot(std::span<const double> w, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * x[k];
  return s;
}

void check_weights(std::span<const double> weights) {
  if (weights.size() != kFeatureCount) {
    throw Error(ErrorCode::FeatureMismatch, "model has " + std::to_string(weights.size()) +
                                                " weights, expected " +
                                                std::to_string(kFeatureCount));
  }
}

std::unique_ptr<Optimizer> make_optimizer(const TrainConfig& cfg) {
  if (cfg.optimizer == OptimizerKind::SGD) return std::make_unique<Sgd>(cfg.learning_rate);
  return std::make_unique<Adam>(kFeatureCount, cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2,
                                cfg.adam_eps);
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::InvalidArgument, "learning rate must be nonnegative");
  }
  if (iterations == 0 || batch_size == 0) {
    throw Error(ErrorCode::InvalidArgument, "iterations and batch size must be positive");
  }
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0) ||
      !(adam_eps > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "invalid Adam parameters");
  }
  for (auto d : patch_dims) {
    if (d == 0) throw Error(ErrorCode::InvalidArgument, "patch dims must be positive");
  }
}

FeatureVolume featurize(const LongitudinalCase& c) {
  const auto& g = c.baseline.geometry();
  if (c.followup.geometry() != g) throw Error(ErrorCode::ShapeMismatch, "scan geometries differ");
  const std::size_t n = g.voxel_count();
  const auto base = c.baseline.data();
  const auto follow = c.followup.data();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = follow[i] - base[i];

  // Separable 3-tap box sums with zero padding.
  std::vector<double> sum = diff, tmp(n);
  const std::size_t strides[3] = {1, g.dims[0], g.dims[0] * g.dims[1]};
  for (int axis = 0; axis < 3; ++axis) {
    const auto stride = strides[axis];
    const auto len = g.dims[axis];
    for (std::size_t i = 0; i < n; ++i) {
      const auto pos = (i / stride) % len;
      double s = sum[i];
      if (pos > 0) s += sum[i - stride];
      if (pos + 1 < len) s += sum[i + stride];
      tmp[i] = s;
    }
    sum.swap(tmp);
  }

  FeatureVolume out;
  out.geometry = g;
  out.values.resize(n * kFeatureCount);
  for (std::size_t i = 0; i < n; ++i) {
    double* f = &out.values[i * kFeatureCount];
    f[0] = base[i];
    f[1] = follow[i];
    f[2] = diff[i];
    f[3] = sum[i] / 27.0;
    f[4] = 1.0;
  }
  return out;
}

FeatureVolume crop_features(const FeatureVolume& features, const Index3& origin,
                            const Dims& patch_dims) {
  const auto& g = features.geometry;
  for (int k = 0; k < 3; ++k) {
    if (origin[k] < 0 || static_cast<std::size_t>(origin[k]) + patch_dims[k] > g.dims[k]) {
      throw Error(ErrorCode::PatchTooLarge, "patch exceeds the volume");
    }
  }
  FeatureVolume out;
  out.geometry = {patch_dims, g.spacing};
  out.values.reserve(out.geometry.voxel_count() * kFeatureCount);
  for (std::size_t z = 0; z < patch_dims[2]; ++z) {
    for (std::size_t y = 0; y < patch_dims[1]; ++y) {
      const auto row = g.index(static_cast<std::size_t>(origin[0]),
                               static_cast<std::size_t>(origin[1]) + y,
                               static_cast<std::size_t>(origin[2]) + z);
      const auto first = features.values.begin() + static_cast<std::ptrdiff_t>(row * kFeatureCount);
      out.values.insert(out.values.end(), first,
                        first + static_cast<std::ptrdiff_t>(patch_dims[0] * kFeatureCount));
    }
  }
  return out;
}

double model_loss(std::span<const double> weights, const LossSpec& spec,
                  std::span<const Patch> patches, std::vector<double>* grad) {
  check_weights(weights);
  if (patches.empty()) throw Error(ErrorCode::EmptyInput, "no patches");
  if (grad) grad->assign(kFeatureCount, 0.0);
  const double inv_b = 1.0 / static_cast<double>(patches.size());
  double total = 0.0;
  std::vector<double> p;
  for (const auto& patch : patches) {
    const std::size_t n = patch.labels.size();
    if (patch.features.values.size() != n * kFeatureCount) {
      throw Error(ErrorCode::FeatureMismatch, "patch features do not match its labels");
    }
    p.resize(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = sigmoid(dot(weights, patch.features.voxel(i)));
    if (!grad) {
      total += loss_value(spec, patch.labels, p);
      continue;
    }
    const auto eval = loss_eval(spec, patch.labels, p);
    total += eval.value;
    for (std::size_t i = 0; i < n; ++i) {
      const double dz = eval.grad[i] * p[i] * (1.0 - p[i]) * inv_b;
      if (dz == 0.0) continue;
      const auto x = patch.features.voxel(i);
      for (std::size_t k = 0; k < kFeatureCount; ++k) (*grad)[k] += dz * x[k];
    }
  }
  return total * inv_b;
}

TrainHistory train_toy(std::span<const LongitudinalCase> train, const LossSpec& spec,
                       const TrainConfig& cfg, std::span<const LongitudinalCase> heldout) {
  if (train.empty()) throw Error(ErrorCode::EmptyInput, "no training cases");
  spec.validate();
  cfg.validate();

  std::vector<FeatureVolume> features;
  features.reserve(train.size());
  for (const auto& c : train) features.push_back(featurize(c));

  TrainHistory history;
  auto optimizer = make_optimizer(cfg);
  std::vector<double> grad;
  std::vector<Patch> batch(cfg.batch_size);
  history.losses.reserve(cfg.iterations);

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    for (std::size_t slot = 0; slot < cfg.batch_size; ++slot) {
      std::mt19937_64 rng(derive_seed(cfg.seed, it, slot));
      std::uniform_int_distribution<std::size_t> pick(0, train.size() - 1);
      const auto ci = pick(rng);
      const auto& mask = train[ci].new_lesion_mask;
      const auto origin = crop_origin(mask, cfg.patch_dims, rng());
      batch[slot].features = crop_features(features[ci], origin, cfg.patch_dims);
      std::vector<double> labels(mask.data().begin(), mask.data().end());
      const auto cropped = crop_values(labels, mask.geometry(), origin, cfg.patch_dims);
      batch[slot].labels.assign(cropped.begin(), cropped.end());
    }
    const double loss = model_loss(history.model.weights, spec, batch, &grad);
    if (!std::isfinite(loss)) {
      history.diverged = true;
      break;
    }
    history.losses.push_back(loss);
    optimizer->step(history.model.weights, grad);
  }

  for (const auto& c : heldout) {
    history.holdout_ids.push_back(c.case_id);
    history.holdout_reports.push_back(full_report(c.new_lesion_mask, predict(history.model, c), cfg.report));
  }
  return history;
}

ProbGrid predict(const ToyModel& model, const FeatureVolume& features) {
  check_weights(model.weights);
  const std::size_t n = features.geometry.voxel_count();
  if (features.values.size() != n * kFeatureCount) {
    throw Error(ErrorCode::FeatureMismatch, "feature volume has the wrong width");
  }
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = sigmoid(dot(model.weights, features.voxel(i)));
  return ProbGrid(VoxelGrid(features.geometry, std::move(p)));
}

ProbGrid predict(const ToyModel& model, const LongitudinalCase& c) {
  return predict(model, featurize(c));
}

}  // namespace segloss
