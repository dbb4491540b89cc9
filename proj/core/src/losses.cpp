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

#include "segloss/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "segloss/error.hpp"

namespace segloss {
namespace {

using Labels = std::span<const std::uint8_t>;
using Probs = std::span<const double>;
using Grad = std::span<double>;

// R = num / den with dnum/dp_i = c * ind_i and dden/dp_i = d, where ind_i is
// y_i for foreground ratios and 1 - y_i for background ratios.
struct Ratio {
  double num = 0.0;
  double den = 0.0;
  double c = 0.0;
  double d = 0.0;
  bool background = false;

  double value() const { return den > 0.0 ? num / den : 1.0; }
  double grad(std::uint8_t y) const {
    if (den <= 0.0) return 0.0;
    const double ind = background ? 1.0 - y : static_cast<double>(y);
    return (c * ind * den - num * d) / (den * den);
  }
};

Ratio tversky_ratio(Labels y, Probs p, double alpha, double s) {
  double tp = 0.0, fn = 0.0, fp = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (y[i]) {
      tp += p[i];
      fn += 1.0 - p[i];
    } else {
      fp += p[i];
    }
  }
  return {tp + s, tp + alpha * fn + (1.0 - alpha) * fp + s, 1.0, 1.0 - alpha, false};
}

// Tversky index of the background class: labels 1 - y, predictions 1 - p.
Ratio tversky_ratio_background(Labels y, Probs p, double alpha, double s) {
  double tp = 0.0, fn = 0.0, fp = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (y[i]) {
      fp += 1.0 - p[i];
    } else {
      tp += 1.0 - p[i];
      fn += p[i];
    }
  }
  return {tp + s, tp + alpha * fn + (1.0 - alpha) * fp + s, -1.0, -(1.0 - alpha), true};
}

Ratio dice_ratio(Labels y, Probs p, double s) {
  double tp = 0.0, sy = 0.0, sp = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (y[i]) {
      tp += p[i];
      sy += 1.0;
    }
    sp += p[i];
  }
  return {2.0 * tp + s, sy + sp + s, 2.0, 1.0, false};
}

// Adds scale * d(1 - R)/dp.
void add_complement_grad(const Ratio& r, Labels y, double scale, Grad grad) {
  if (grad.empty() || scale == 0.0) return;
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] -= scale * r.grad(y[i]);
}

// (1 - R)^k, accumulating scale * its gradient.
double complement_power(const Ratio& r, double k, Labels y, double scale, Grad grad) {
  const double base = 1.0 - r.value();
  if (base <= 0.0) return 0.0;
  add_complement_grad(r, y, scale * k * std::pow(base, k - 1.0), grad);
  return std::pow(base, k);
}

double complement(const Ratio& r, Labels y, double scale, Grad grad) {
  add_complement_grad(r, y, scale, grad);
  return 1.0 - r.value();
}

struct Clamped {
  double p;
  double dp;  // derivative of the clamp: 1 strictly inside, 0 on the flats
};

Clamped clamp_prob(double p, double eps) {
  if (p <= eps) return {eps, 0.0};
  if (p >= 1.0 - eps) return {1.0 - eps, 0.0};
  return {p, 1.0};
}

// -(1/N) sum[w_pos * y * log p + w_neg * (1 - y) * log(1 - p)].
double weighted_bce(Labels y, Probs p, double w_pos, double w_neg, double eps, double scale,
                    Grad grad) {
  const double inv_n = 1.0 / static_cast<double>(p.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto c = clamp_prob(p[i], eps);
    double g = 0.0;
    if (y[i]) {
      sum -= w_pos * std::log(c.p);
      g = -w_pos / c.p;
    } else {
      sum -= w_neg * std::log1p(-c.p);
      g = w_neg / (1.0 - c.p);
    }
    if (!grad.empty()) grad[i] += scale * g * c.dp * inv_n;
  }
  return sum * inv_n;
}

// -(1/N) sum[beta * (y - log p) + (1 - beta) * (1 - y) * log(1 - p)].
double mce_as_printed(Labels y, Probs p, double beta, double eps, double scale, Grad grad) {
  const double inv_n = 1.0 / static_cast<double>(p.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto c = clamp_prob(p[i], eps);
    double term = beta * (static_cast<double>(y[i]) - std::log(c.p));
    double g = beta / c.p;
    if (!y[i]) {
      term += (1.0 - beta) * std::log1p(-c.p);
      g += (1.0 - beta) / (1.0 - c.p);
    }
    sum -= term;
    if (!grad.empty()) grad[i] += scale * g * c.dp * inv_n;
  }
  return sum * inv_n;
}

double mce(Labels y, Probs p, double beta, MceVariant variant, double eps, double scale,
           Grad grad) {
  if (variant == MceVariant::AsPrinted) return mce_as_printed(y, p, beta, eps, scale, grad);
  return weighted_bce(y, p, beta, 1.0 - beta, eps, scale, grad);
}

// -(1/N) sum w_c * (1 - p_t)^g * log p_t, with p_t = p on foreground and
// 1 - p on background. With focal_fg false the foreground term drops the
// modulating factor (plain weighted log-loss).
double focal(Labels y, Probs p, double g, double w_fg, double w_bg, bool focal_fg, double eps,
             double scale, Grad grad) {
  const double inv_n = 1.0 / static_cast<double>(p.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto c = clamp_prob(p[i], eps);
    const bool fg = y[i] != 0;
    const double pt = fg ? c.p : 1.0 - c.p;
    const double w = fg ? w_fg : w_bg;
    const double log_pt = std::log(pt);
    double value, dvalue_dpt;
    if (fg && !focal_fg) {
      value = -log_pt;
      dvalue_dpt = -1.0 / pt;
    } else {
      const double q = 1.0 - pt;
      const double mod = std::pow(q, g);
      value = -mod * log_pt;
      dvalue_dpt = g * std::pow(q, g - 1.0) * log_pt - mod / pt;
    }
    sum += w * value;
    if (!grad.empty()) {
      const double dpt_dp = fg ? 1.0 : -1.0;
      grad[i] += scale * w * dvalue_dpt * dpt_dp * c.dp * inv_n;
    }
  }
  return sum * inv_n;
}

// lambda * modified focal CE + (1 - lambda) * modified focal Tversky, with
// delta = alpha weighting foreground vs background and lambda = gamma.
double unified_focal(Labels y, Probs p, const LossSpec& s, bool asymmetric, double scale,
                     Grad grad) {
  const double delta = s.alpha;
  const double lambda = s.gamma;
  const double kappa = 1.0 / s.focal_exp;

  const double ce = focal(y, p, s.focal_exp, delta, 1.0 - delta, !asymmetric, s.clamp_eps,
                          scale * lambda, grad);

  const auto fg = tversky_ratio(y, p, delta, s.smooth);
  const auto bg = tversky_ratio_background(y, p, delta, s.smooth);
  const double ft_scale = scale * (1.0 - lambda) * 0.5;
  double ft = complement_power(fg, kappa, y, ft_scale, grad);
  ft += asymmetric ? complement(bg, y, ft_scale, grad)
                   : complement_power(bg, kappa, y, ft_scale, grad);
  return lambda * ce + (1.0 - lambda) * 0.5 * ft;
}

double evaluate(const LossSpec& s, Labels y, Probs p, Grad grad) {
  const double eps = s.clamp_eps;
  switch (s.kind) {
    case LossKind::Dice:
      return complement(dice_ratio(y, p, s.smooth), y, 1.0, grad);
    case LossKind::CE:
      return weighted_bce(y, p, 1.0, 1.0, eps, 1.0, grad);
    case LossKind::WeightedCE:
      return weighted_bce(y, p, s.pos_weight, 1.0, eps, 1.0, grad);
    case LossKind::Focal:
      return focal(y, p, s.focal_exp, 1.0, 1.0, true, eps, 1.0, grad);
    case LossKind::Tversky:
      return complement(tversky_ratio(y, p, s.alpha, s.smooth), y, 1.0, grad);
    case LossKind::FocalTversky:
      return complement_power(tversky_ratio(y, p, s.alpha, s.smooth), s.focal_exp, y, 1.0, grad);
    case LossKind::FocalDice:
      return complement_power(dice_ratio(y, p, s.smooth), s.focal_exp, y, 1.0, grad);
    case LossKind::LogcoshDice: {
      const auto r = dice_ratio(y, p, s.smooth);
      const double d = 1.0 - r.value();
      add_complement_grad(r, y, std::tanh(d), grad);
      return std::log(std::cosh(d));
    }
    case LossKind::DiceCE:
      return complement(dice_ratio(y, p, s.smooth), y, 1.0, grad) +
             weighted_bce(y, p, 1.0, 1.0, eps, 1.0, grad);
    case LossKind::Combo:
      return s.gamma * mce(y, p, s.beta, MceVariant::Canonical, eps, s.gamma, grad) +
             (1.0 - s.gamma) * complement(dice_ratio(y, p, s.smooth), y, 1.0 - s.gamma, grad);
    case LossKind::SymUnifiedFocal:
      return unified_focal(y, p, s, false, 1.0, grad);
    case LossKind::AsymUnifiedFocal:
      return unified_focal(y, p, s, true, 1.0, grad);
    case LossKind::HyTver:
      return s.gamma * mce(y, p, s.beta, s.mce_variant, eps, s.gamma, grad) +
             (1.0 - s.gamma) *
                 complement(tversky_ratio(y, p, s.alpha, s.smooth), y, 1.0 - s.gamma, grad);
  }
  throw Error(ErrorCode::UnknownKind, "loss kind " + std::to_string(static_cast<int>(s.kind)));
}

void check_spans(Labels y, Probs p) {
  if (y.size() != p.size()) {
    throw Error(ErrorCode::ShapeMismatch, "label count " + std::to_string(y.size()) +
                                              " != probability count " + std::to_string(p.size()));
  }
  if (p.empty()) throw Error(ErrorCode::ShapeMismatch, "empty input");
}

void check_shapes(const BinaryMask& y, const ProbGrid& p) {
  if (y.dims() != p.dims()) throw Error(ErrorCode::ShapeMismatch, "mask and probability dims differ");
}

}  // namespace

double tversky_index(std::span<const std::uint8_t> y, std::span<const double> p, double alpha,
                     double smooth) {
  check_spans(y, p);
  return tversky_ratio(y, p, alpha, smooth).value();
}

double tversky_index(const BinaryMask& y, const ProbGrid& p, double alpha, double smooth) {
  check_shapes(y, p);
  return tversky_index(y.data(), p.data(), alpha, smooth);
}

LossEval loss_eval(const LossSpec& spec, std::span<const std::uint8_t> y,
                   std::span<const double> p) {
  spec.validate();
  check_spans(y, p);
  LossEval out;
  out.grad.assign(p.size(), 0.0);
  out.value = evaluate(spec, y, p, out.grad);
  return out;
}

double loss_value(const LossSpec& spec, std::span<const std::uint8_t> y,
                  std::span<const double> p) {
  spec.validate();
  check_spans(y, p);
  return evaluate(spec, y, p, {});
}

LossEval loss_eval(const LossSpec& spec, const BinaryMask& y, const ProbGrid& p) {
  check_shapes(y, p);
  return loss_eval(spec, y.data(), p.data());
}

double loss_value(const LossSpec& spec, const BinaryMask& y, const ProbGrid& p) {
  check_shapes(y, p);
  return loss_value(spec, y.data(), p.data());
}

LossEval loss_mce(const BinaryMask& y, const ProbGrid& p, double beta, MceVariant variant,
                  double clamp_eps) {
  check_shapes(y, p);
  LossSpec spec;
  spec.kind = LossKind::HyTver;
  spec.gamma = 1.0;
  spec.beta = beta;
  spec.mce_variant = variant;
  spec.clamp_eps = clamp_eps;
  spec.validate();
  LossEval out;
  out.grad.assign(p.size(), 0.0);
  out.value = mce(y.data(), p.data(), beta, variant, clamp_eps, 1.0, out.grad);
  return out;
}

LossEval loss_hytver(const BinaryMask& y, const ProbGrid& p, const LossSpec& spec) {
  if (spec.kind != LossKind::HyTver) {
    throw Error(ErrorCode::InvalidArgument, "loss_hytver requires kind=hytver");
  }
  return loss_eval(spec, y, p);
}

LossEval loss_comparator(LossKind kind, const BinaryMask& y, const ProbGrid& p,
                         const LossSpec& spec) {
  if (kind == LossKind::HyTver) {
    throw Error(ErrorCode::InvalidArgument, "hytver is not a comparator loss");
  }
  if (std::find(kAllLossKinds.begin(), kAllLossKinds.end(), kind) == kAllLossKinds.end()) {
    throw Error(ErrorCode::UnknownKind, "loss kind " + std::to_string(static_cast<int>(kind)));
  }
  auto s = spec;
  s.kind = kind;
  return loss_eval(s, y, p);
}

LossRange loss_range(const LossSpec& s) {
  // Largest per-voxel -log of a clamped probability; log1p(-(1 - eps)) can
  // round just past log(eps).
  const double log_bound = std::max(-std::log(s.clamp_eps), -std::log1p(-(1.0 - s.clamp_eps)));
  const double mce_hi = std::max(s.beta, 1.0 - s.beta) * log_bound;
  switch (s.kind) {
    case LossKind::Dice:
    case LossKind::Tversky:
    case LossKind::FocalDice:
    case LossKind::FocalTversky:
      return {0.0, 1.0};
    case LossKind::LogcoshDice:
      return {0.0, std::log(std::cosh(1.0))};
    case LossKind::CE:
    case LossKind::Focal:
      return {0.0, log_bound};
    case LossKind::WeightedCE:
      return {0.0, std::max(1.0, s.pos_weight) * log_bound};
    case LossKind::DiceCE:
      return {0.0, 1.0 + log_bound};
    case LossKind::Combo:
      return {0.0, std::max(1.0, mce_hi)};
    case LossKind::SymUnifiedFocal:
    case LossKind::AsymUnifiedFocal:
      return {0.0, std::max(1.0, std::max(s.alpha, 1.0 - s.alpha) * log_bound)};
    case LossKind::HyTver:
      if (s.mce_variant == MceVariant::AsPrinted) {
        return {-s.gamma * s.beta * (1.0 + log_bound),
                std::max(1.0, (1.0 - s.beta) * log_bound)};
      }
      return {0.0, std::max(1.0, mce_hi)};
  }
  throw Error(ErrorCode::UnknownKind, "loss kind " + std::to_string(static_cast<int>(s.kind)));
}

}  // namespace segloss
