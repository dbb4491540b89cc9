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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "segloss/error.hpp"
#include "segloss/stats.hpp"
#include "segloss/text.hpp"
#include "test_util.hpp"

namespace segloss {
namespace {

using testing::code_of;

double cv_of(std::vector<double> v) { return cv(v); }
BoxSummary box_of(std::vector<double> v) { return box_summary(v); }

TEST(Cv, Examples) {
  EXPECT_EQ(cv_of({5, 5, 5, 5}), 0.0);
  EXPECT_NEAR(cv_of({1, 3}), 0.7071067811865476, 1e-15);
  EXPECT_NEAR(cv_of({1, 3}), std::sqrt(2.0) / 2.0, 1e-15);
  // shifting up keeps the sd and grows the mean
  EXPECT_LT(cv_of({11, 13}), cv_of({1, 3}));
}

TEST(Cv, Errors) {
  EXPECT_EQ(code_of([] { cv_of({1}); }), ErrorCode::TooFewValues);
  EXPECT_EQ(code_of([] { cv_of({-1, 1}); }), ErrorCode::ZeroMean);
}

TEST(Cv, ScaleInvariant) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> v(2 + t % 9);
    for (auto& x : v) x = u(rng);
    const double k = u(rng);
    std::vector<double> kv(v);
    for (auto& x : kv) x *= k;
    EXPECT_NEAR(cv(kv), cv(v), 1e-12);
  }
}

TEST(Box, Examples) {
  auto b = box_of({1, 2, 3, 4, 5});
  EXPECT_EQ(b.median, 3.0);
  EXPECT_EQ(b.q1, 2.0);
  EXPECT_EQ(b.q3, 4.0);
  EXPECT_TRUE(b.outliers.empty());
  EXPECT_EQ(b.lower_whisker, 1.0);
  EXPECT_EQ(b.upper_whisker, 5.0);

  auto one = box_of({7});
  EXPECT_EQ(one.median, 7.0);
  EXPECT_EQ(one.q1, 7.0);
  EXPECT_EQ(one.q3, 7.0);
  EXPECT_EQ(one.iqr, 0.0);

  auto out = box_of({1, 2, 3, 4, 100});
  EXPECT_EQ(out.outliers, std::vector<double>{100.0});
  EXPECT_EQ(out.upper_whisker, 4.0);
  EXPECT_EQ(out.q3 + 1.5 * out.iqr, 7.0);
}

TEST(Box, InterpolatedQuartiles) {
  auto b = box_of({4, 1, 3, 2});  // unsorted input
  EXPECT_EQ(b.median, 2.5);
  EXPECT_EQ(b.q1, 1.75);
  EXPECT_EQ(b.q3, 3.25);
  EXPECT_EQ(code_of([] { box_of({}); }), ErrorCode::EmptyInput);
}

TEST(Box, PartitionProperty) {
  std::mt19937_64 rng(72);
  std::lognormal_distribution<double> heavy(0.0, 1.5);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> v(1 + t % 17);
    for (auto& x : v) x = heavy(rng);
    auto b = box_summary(v);
    EXPECT_LE(b.q1, b.median);
    EXPECT_LE(b.median, b.q3);
    EXPECT_GE(b.iqr, 0.0);
    const double lo = b.q1 - 1.5 * b.iqr, hi = b.q3 + 1.5 * b.iqr;
    std::vector<double> inside, outside;
    for (double x : v) (x < lo || x > hi ? outside : inside).push_back(x);
    std::sort(outside.begin(), outside.end());
    EXPECT_EQ(b.outliers, outside);
    ASSERT_FALSE(inside.empty());
    EXPECT_EQ(b.lower_whisker, *std::min_element(inside.begin(), inside.end()));
    EXPECT_EQ(b.upper_whisker, *std::max_element(inside.begin(), inside.end()));
  }
}

MetricReport report(double dc, std::optional<double> hd) {
  MetricReport r;
  r.dc = dc;
  r.jc = dc / (2 - dc);
  r.hd = hd;
  r.asd = hd ? std::optional<double>(*hd / 2) : std::nullopt;
  r.voxel_pr = dc;
  r.voxel_rc = dc;
  r.voxel_f1 = dc;
  r.lesion_pr = 1.0;
  r.lesion_rc = 0.5;
  r.lesion_f1 = 2.0 / 3.0;
  return r;
}

std::vector<CaseRow> random_rows(std::mt19937_64& rng, std::size_t per_loss) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::bernoulli_distribution absent(0.2);
  std::vector<CaseRow> rows;
  for (auto kind : {LossKind::HyTver, LossKind::Dice, LossKind::Combo}) {
    for (std::size_t i = 0; i < per_loss; ++i) {
      rows.push_back({kind, "case_" + std::to_string(i),
                      report(u(rng), absent(rng) ? std::nullopt : std::optional<double>(10 * u(rng)))});
    }
  }
  return rows;
}

TEST(Aggregate, IdenticalReports) {
  std::vector<CaseRow> rows(3, CaseRow{LossKind::Tversky, "c", report(0.8, 2.0)});
  auto s = aggregate_report(rows);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].kind, LossKind::Tversky);
  EXPECT_EQ(s[0].n, 3u);
  EXPECT_DOUBLE_EQ(s[0].dc_mean, 0.8);
  EXPECT_DOUBLE_EQ(*s[0].hd_mean, 2.0);
  EXPECT_NEAR(*s[0].dc_cv, 0.0, 1e-15);
}

TEST(Aggregate, EnumOrderAndExclusions) {
  std::vector<CaseRow> rows{{LossKind::HyTver, "a", report(0.5, std::nullopt)},
                            {LossKind::Dice, "a", report(0.7, 3.0)},
                            {LossKind::HyTver, "b", report(0.9, 4.0)}};
  auto s = aggregate_report(rows);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].kind, LossKind::Dice);
  EXPECT_EQ(s[1].kind, LossKind::HyTver);
  EXPECT_EQ(s[1].hd_excluded, 1u);
  EXPECT_DOUBLE_EQ(*s[1].hd_mean, 4.0);
  EXPECT_FALSE(s[0].dc_cv.has_value());  // single case
  EXPECT_EQ(code_of([] { aggregate_report({}); }), ErrorCode::EmptyInput);
}

TEST(Aggregate, PermutationInvariant) {
  std::mt19937_64 rng(73);
  auto rows = random_rows(rng, 9);
  const auto expected = summary_csv(aggregate_report(rows));
  for (int t = 0; t < 10; ++t) {
    std::shuffle(rows.begin(), rows.end(), rng);
    EXPECT_EQ(summary_csv(aggregate_report(rows)), expected);
  }
}

// Means recomputed directly from the text of the per-case CSV.
TEST(Aggregate, RecomputeFromCaseCsv) {
  std::mt19937_64 rng(74);
  auto rows = random_rows(rng, 7);
  std::string csv = case_csv_header() + "\n";
  for (const auto& r : rows) csv += case_csv_row(r) + "\n";

  std::map<std::string, std::vector<std::vector<std::string>>> by_loss;
  std::size_t line_start = csv.find('\n') + 1;
  while (line_start < csv.size()) {
    const auto end = csv.find('\n', line_start);
    auto fields = text::split(csv.substr(line_start, end - line_start), ',');
    by_loss[fields[0]].push_back(fields);
    line_start = end + 1;
  }
  const auto summaries = aggregate_report(parse_case_csv(csv));
  ASSERT_EQ(summaries.size(), by_loss.size());
  for (const auto& s : summaries) {
    const auto& lines = by_loss.at(std::string(kind_name(s.kind)));
    double dc = 0, pr = 0, hd = 0;
    std::size_t hd_n = 0;
    for (const auto& f : lines) {
      dc += std::stod(f[2]);
      pr += std::stod(f[6]);
      if (!f[4].empty()) {
        hd += std::stod(f[4]);
        ++hd_n;
      }
    }
    EXPECT_NEAR(s.dc_mean, dc / lines.size(), 1e-12);
    EXPECT_NEAR(s.pr_mean, pr / lines.size(), 1e-12);
    EXPECT_NEAR(*s.hd_mean, hd / hd_n, 1e-12);
    EXPECT_EQ(s.hd_excluded, lines.size() - hd_n);
  }
}

TEST(Csv, CaseRoundTrip) {
  CaseRow row{LossKind::FocalTversky, "case_007", report(1.0 / 3.0, 0.1)};
  auto back = parse_case_csv(case_csv_header() + "\n" + case_csv_row(row) + "\n");
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].kind, row.kind);
  EXPECT_EQ(back[0].case_id, row.case_id);
  EXPECT_EQ(back[0].report.dc, row.report.dc);
  EXPECT_EQ(back[0].report.lesion_f1, row.report.lesion_f1);
  EXPECT_EQ(code_of([] { parse_case_csv(case_csv_header() + "\ndice,a,1\n"); }),
            ErrorCode::ParseError);
}

TEST(Csv, SummaryColumns) {
  const auto header = summary_csv_header();
  EXPECT_EQ(header.rfind("loss,n,dc_mean,jc_mean,hd_mean,asd_mean,pr_mean,f1_mean,dc_cv,pr_cv,f1_cv,"
                         "dc_median,dc_q1,dc_q3,dc_outlier_count,",
                         0),
            0u);
  std::vector<CaseRow> rows(2, CaseRow{LossKind::Dice, "c", report(0.5, std::nullopt)});
  auto line = summary_csv_row(aggregate_report(rows)[0]);
  EXPECT_EQ(text::split(line, ',').size(), text::split(header, ',').size());
  EXPECT_EQ(line.rfind("dice,2,0.5,", 0), 0u) << line;
}

}  // namespace
}  // namespace segloss
