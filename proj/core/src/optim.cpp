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

#include "segloss/optim.hpp"

#include <cmath>
#include <string>

#include "segloss/error.hpp"
#include "segloss/text.hpp"

namespace segloss {

OptimizerKind parse_optimizer(std::string_view name) {
  const auto key = text::to_lower(name);
  if (key == "sgd") return OptimizerKind::SGD;
  if (key == "adam") return OptimizerKind::Adam;
  throw Error(ErrorCode::ParseError, "unknown optimizer '" + std::string(name) + "'");
}

void Sgd::step(std::span<double> weights, std::span<const double> grad) {
  if (weights.size() != grad.size()) throw Error(ErrorCode::ShapeMismatch, "gradient size");
  for (std::size_t i = 0; i < weights.size(); ++i) weights[i] -= lr_ * grad[i];
}

Adam::Adam(std::size_t size, double learning_rate, double beta1, double beta2, double eps)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps), m_(size, 0.0), v_(size, 0.0) {}

void Adam::step(std::span<double> weights, std::span<const double> grad) {
  if (weights.size() != m_.size() || grad.size() != m_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "gradient size");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    weights[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
  }
}

}  // namespace segloss
