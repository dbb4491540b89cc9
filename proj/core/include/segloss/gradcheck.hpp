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
#include "segloss/volume.hpp"

namespace segloss {

struct GradCheckOptions {
  std::size_t trials = 20;
  std::uint64_t seed = 42;
  double rel_tol = 1e-4;
  double abs_tol = 1e-7;
  double step = 1e-4;
  Dims dims{5, 5, 5};
  /// Test hook: compare against the sign-flipped analytic gradient.
  bool corrupt_gradient = false;
};

struct GradCheckReport {
  LossKind kind = LossKind::HyTver;
  double max_rel_err = 0.0;
  double max_abs_err = 0.0;
  std::size_t worst_voxel = 0;
  std::size_t worst_trial = 0;
  bool passed = true;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

/// Central differences of the forward loss value, one voxel at a time.
/// Every p must lie in [2*step, 1 - 2*step] (StepTooLarge otherwise).
std::vector<double> finite_diff_grad(const LossSpec& spec, std::span<const std::uint8_t> y,
                                     std::span<const double> p, double step);
std::vector<double> finite_diff_grad(const LossSpec& spec, const BinaryMask& y,
                                     const ProbGrid& p, double step);

/// Compares analytic and finite-difference gradients on `trials` seeded
/// random pairs (p uniform in [0.05, 0.95], y ~ Bernoulli(0.3)). A voxel
/// passes when its relative error is within rel_tol or its absolute error
/// within abs_tol.
GradCheckReport grad_check(const LossSpec& spec, const GradCheckOptions& options = {});

/// "kind=... max_rel_err=... max_abs_err=... worst_voxel=... passed=true|false"
std::string format_report(const GradCheckReport& report);

}  // namespace segloss
