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
#include <span>
#include <vector>

#include "segloss/loss_spec.hpp"
#include "segloss/volume.hpp"

namespace segloss {

/// Loss value plus dL/dp for every voxel.
struct LossEval {
  double value = 0.0;
  std::vector<double> grad;
};

/// Closed interval a loss value is guaranteed to lie in for a given spec.
struct LossRange {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const noexcept { return v >= lo && v <= hi; }
};

// Every function below takes the ground truth y and predicted probabilities
// p. Grid overloads check that dims agree (ShapeMismatch); span overloads
// check lengths. Gradients are taken with respect to p only.

/// TI = (sum(y*p) + s) / (sum(y*p) + alpha*sum(y*(1-p)) + (1-alpha)*sum((1-y)*p) + s).
/// alpha weights false negatives, 1 - alpha false positives. With zero
/// smoothing and an all-zero denominator the index is taken to be 1.
double tversky_index(const BinaryMask& y, const ProbGrid& p, double alpha, double smooth);
double tversky_index(std::span<const std::uint8_t> y, std::span<const double> p, double alpha,
                     double smooth);

/// Modified (class-weighted) cross-entropy, p clamped to [eps, 1 - eps].
LossEval loss_mce(const BinaryMask& y, const ProbGrid& p, double beta, MceVariant variant,
                  double clamp_eps);

/// gamma * mCE + (1 - gamma) * (1 - TI). spec.kind must be HyTver.
LossEval loss_hytver(const BinaryMask& y, const ProbGrid& p, const LossSpec& spec);

/// Any of the twelve non-HyTver kinds.
LossEval loss_comparator(LossKind kind, const BinaryMask& y, const ProbGrid& p,
                         const LossSpec& spec);

/// Dispatches on spec.kind.
LossEval loss_eval(const LossSpec& spec, const BinaryMask& y, const ProbGrid& p);
LossEval loss_eval(const LossSpec& spec, std::span<const std::uint8_t> y,
                   std::span<const double> p);

/// Forward value only; same arithmetic as loss_eval(...).value.
double loss_value(const LossSpec& spec, const BinaryMask& y, const ProbGrid& p);
double loss_value(const LossSpec& spec, std::span<const std::uint8_t> y,
                  std::span<const double> p);

LossRange loss_range(const LossSpec& spec);

}  // namespace segloss
