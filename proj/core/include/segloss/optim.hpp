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
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace segloss {

enum class OptimizerKind { SGD, Adam };

OptimizerKind parse_optimizer(std::string_view name);

class Optimizer {
 public:
  virtual ~Optimizer() = default;
  /// In-place update of `weights` given the gradient of the objective.
  virtual void step(std::span<double> weights, std::span<const double> grad) = 0;
};

class Sgd final : public Optimizer {
 public:
  explicit Sgd(double learning_rate) : lr_(learning_rate) {}
  void step(std::span<double> weights, std::span<const double> grad) override;

 private:
  double lr_;
};

/// Adam with bias-corrected first and second moments.
class Adam final : public Optimizer {
 public:
  Adam(std::size_t size, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);
  void step(std::span<double> weights, std::span<const double> grad) override;

  std::size_t steps() const noexcept { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::vector<double> m_, v_;
  std::size_t t_ = 0;
};

}  // namespace segloss
