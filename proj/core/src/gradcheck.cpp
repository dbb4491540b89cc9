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

#include "segloss/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "segloss/error.hpp"
#include "segloss/losses.hpp"
#include "segloss/rng.hpp"
#include "segloss/text.hpp"

namespace segloss {

std::vector<double> finite_diff_grad(const LossSpec& spec, std::span<const std::uint8_t> y,
                                     std::span<const double> p, double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "step must be positive");
  for (double v : p) {
    if (v < 2.0 * step || v > 1.0 - 2.0 * step) {
      throw Error(ErrorCode::StepTooLarge, "perturbed probability would leave [0, 1]");
    }
  }
  std::vector<double> work(p.begin(), p.end());
  std::vector<double> grad(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double orig = work[j];
    work[j] = orig + step;
    const double up = loss_value(spec, y, work);
    work[j] = orig - step;
    const double down = loss_value(spec, y, work);
    work[j] = orig;
    grad[j] = (up - down) / (2.0 * step);
  }
  return grad;
}

std::vector<double> finite_diff_grad(const LossSpec& spec, const BinaryMask& y,
                                     const ProbGrid& p, double step) {
  if (y.dims() != p.dims()) throw Error(ErrorCode::ShapeMismatch, "mask and probability dims differ");
  return finite_diff_grad(spec, y.data(), p.data(), step);
}

GradCheckReport grad_check(const LossSpec& spec, const GradCheckOptions& options) {
  if (options.trials == 0) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  spec.validate();

  GradCheckReport report;
  report.kind = spec.kind;
  report.trials = options.trials;
  report.seed = options.seed;

  const Geometry geometry{options.dims, {1.0, 1.0, 1.0}};
  const std::size_t n = geometry.voxel_count();
  std::vector<std::uint8_t> y(n);
  std::vector<double> p(n);

  for (std::size_t t = 0; t < options.trials; ++t) {
    std::mt19937_64 rng(derive_seed(options.seed, t));
    std::uniform_real_distribution<double> prob(0.05, 0.95);
    std::bernoulli_distribution label(0.3);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = label(rng) ? 1 : 0;
      p[i] = prob(rng);
    }

    auto analytic = loss_eval(spec, y, p).grad;
    if (options.corrupt_gradient) {
      for (auto& g : analytic) g = -g;
    }
    const auto numeric = finite_diff_grad(spec, y, p, options.step);

    for (std::size_t i = 0; i < n; ++i) {
      const double abs_err = std::abs(analytic[i] - numeric[i]);
      const double scale = std::max(std::abs(analytic[i]), std::abs(numeric[i]));
      const double rel_err = scale > 0.0 ? abs_err / scale : 0.0;
      if (rel_err > report.max_rel_err) {
        report.max_rel_err = rel_err;
        report.worst_voxel = i;
        report.worst_trial = t;
      }
      report.max_abs_err = std::max(report.max_abs_err, abs_err);
      if (rel_err > options.rel_tol && abs_err > options.abs_tol) report.passed = false;
    }
  }
  return report;
}

std::string format_report(const GradCheckReport& r) {
  std::ostringstream out;
  out << "kind=" << kind_name(r.kind) << " max_rel_err=" << text::format_real(r.max_rel_err)
      << " max_abs_err=" << text::format_real(r.max_abs_err) << " worst_voxel=" << r.worst_voxel
      << " trials=" << r.trials << " seed=" << r.seed << " passed=" << (r.passed ? "true" : "false");
  return out.str();
}

}  // namespace segloss
