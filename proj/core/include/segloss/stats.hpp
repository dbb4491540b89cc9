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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segloss/loss_spec.hpp"
#include "segloss/metrics.hpp"

namespace segloss {

/// Sample standard deviation (n - 1) over the mean, as a ratio.
/// Throws TooFewValues for n < 2 and ZeroMean for a zero mean.
double cv(std::span<const double> values);

/// Tukey box summary. Quartiles use linear interpolation between order
/// statistics at position q * (n - 1); fences sit 1.5 * IQR beyond them.
struct BoxSummary {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  double lower_whisker = 0.0;
  double upper_whisker = 0.0;
  std::vector<double> outliers;  // ascending
};

double quantile(std::span<const double> sorted, double q);
BoxSummary box_summary(std::span<const double> values);

struct CaseRow {
  LossKind kind = LossKind::HyTver;
  std::string case_id;
  MetricReport report;
};

struct LossSummary {
  LossKind kind = LossKind::HyTver;
  std::size_t n = 0;
  double dc_mean = 0.0;
  double jc_mean = 0.0;
  std::optional<double> hd_mean;   // over cases with a defined distance
  std::optional<double> asd_mean;
  std::size_t hd_excluded = 0;     // cases with absent HD
  std::size_t asd_excluded = 0;
  double pr_mean = 0.0;            // voxel precision
  double f1_mean = 0.0;            // voxel F1
  double lesion_pr_mean = 0.0;
  double lesion_rc_mean = 0.0;
  double lesion_f1_mean = 0.0;
  std::optional<double> dc_cv;     // absent when undefined (n < 2 or zero mean)
  std::optional<double> pr_cv;
  std::optional<double> f1_cv;
  BoxSummary dc_box;
  BoxSummary pr_box;
  BoxSummary f1_box;
};

/// One summary per loss kind present, in LossKind order. Throws EmptyInput.
std::vector<LossSummary> aggregate_report(std::span<const CaseRow> rows);

/// Per-case CSV: "loss," + metric_csv_header().
std::string case_csv_header();
std::string case_csv_row(const CaseRow& row);
std::vector<CaseRow> parse_case_csv(const std::string& content);
std::vector<CaseRow> read_case_csv(const std::filesystem::path& path);

std::string summary_csv_header();
std::string summary_csv_row(const LossSummary& summary);
std::string summary_csv(std::span<const LossSummary> summaries);

}  // namespace segloss
