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

#include "segloss/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "segloss/error.hpp"
#include "segloss/text.hpp"

namespace segloss {
namespace {

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::optional<double> try_cv(std::span<const double> v) {
  try {
    return cv(v);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::string opt(const std::optional<double>& v) { return v ? text::format_real(*v) : std::string(); }

void box_fields(std::ostringstream& out, const BoxSummary& b) {
  out << ',' << text::format_real(b.median) << ',' << text::format_real(b.q1) << ','
      << text::format_real(b.q3) << ',' << b.outliers.size();
}

}  // namespace

double cv(std::span<const double> values) {
  if (values.size() < 2) throw Error(ErrorCode::TooFewValues, "cv needs at least two values");
  const double m = mean(values);
  if (m == 0.0) throw Error(ErrorCode::ZeroMean, "cv undefined for zero mean");
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1)) / m;
}

double quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error(ErrorCode::EmptyInput, "quantile of empty data");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BoxSummary box_summary(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "box summary of empty data");
  std::vector<double> s(values.begin(), values.end());
  std::sort(s.begin(), s.end());
  BoxSummary b;
  b.median = quantile(s, 0.5);
  b.q1 = quantile(s, 0.25);
  b.q3 = quantile(s, 0.75);
  b.iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * b.iqr;
  const double hi_fence = b.q3 + 1.5 * b.iqr;
  bool have_whisker = false;
  for (double v : s) {
    if (v < lo_fence || v > hi_fence) {
      b.outliers.push_back(v);
      continue;
    }
    if (!have_whisker) {
      b.lower_whisker = v;
      have_whisker = true;
    }
    b.upper_whisker = v;
  }
  return b;
}

std::vector<LossSummary> aggregate_report(std::span<const CaseRow> rows) {
  if (rows.empty()) throw Error(ErrorCode::EmptyInput, "no rows to aggregate");
  std::map<LossKind, std::vector<const CaseRow*>> by_kind;
  for (const auto& r : rows) by_kind[r.kind].push_back(&r);

  std::vector<LossSummary> out;
  for (auto kind : kAllLossKinds) {
    auto it = by_kind.find(kind);
    if (it == by_kind.end()) continue;
    const auto& group = it->second;

    std::vector<double> dc, jc, hd, asd_v, pr, f1, lpr, lrc, lf1;
    for (const auto* r : group) {
      const auto& m = r->report;
      dc.push_back(m.dc);
      jc.push_back(m.jc);
      if (m.hd) hd.push_back(*m.hd);
      if (m.asd) asd_v.push_back(*m.asd);
      pr.push_back(m.voxel_pr);
      f1.push_back(m.voxel_f1);
      lpr.push_back(m.lesion_pr);
      lrc.push_back(m.lesion_rc);
      lf1.push_back(m.lesion_f1);
    }
    // sorted reductions make the result independent of row order
    for (auto* v : {&dc, &jc, &hd, &asd_v, &pr, &f1, &lpr, &lrc, &lf1}) std::sort(v->begin(), v->end());
    LossSummary s;
    s.kind = kind;
    s.n = group.size();
    s.dc_mean = mean(dc);
    s.jc_mean = mean(jc);
    if (!hd.empty()) s.hd_mean = mean(hd);
    if (!asd_v.empty()) s.asd_mean = mean(asd_v);
    s.hd_excluded = s.n - hd.size();
    s.asd_excluded = s.n - asd_v.size();
    s.pr_mean = mean(pr);
    s.f1_mean = mean(f1);
    s.lesion_pr_mean = mean(lpr);
    s.lesion_rc_mean = mean(lrc);
    s.lesion_f1_mean = mean(lf1);
    s.dc_cv = try_cv(dc);
    s.pr_cv = try_cv(pr);
    s.f1_cv = try_cv(f1);
    s.dc_box = box_summary(dc);
    s.pr_box = box_summary(pr);
    s.f1_box = box_summary(f1);
    out.push_back(std::move(s));
  }
  return out;
}

std::string case_csv_header() { return "loss," + metric_csv_header(); }

std::string case_csv_row(const CaseRow& row) {
  return std::string(kind_name(row.kind)) + "," + metric_csv_row(row.case_id, row.report);
}

std::vector<CaseRow> parse_case_csv(const std::string& content) {
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line) || text::trim(line) != case_csv_header()) {
    throw Error(ErrorCode::ParseError, "per-case CSV header mismatch");
  }
  std::vector<CaseRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto fields = text::split(text::trim(line), ',');
    if (fields.size() != 12) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 12 fields");
    }
    CaseRow r;
    r.kind = parse_kind(fields[0]);
    r.case_id = fields[1];
    r.report = parse_metric_fields(fields, 2);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<CaseRow> read_case_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_case_csv(buf.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

std::string summary_csv_header() {
  return "loss,n,dc_mean,jc_mean,hd_mean,asd_mean,pr_mean,f1_mean,dc_cv,pr_cv,f1_cv,"
         "dc_median,dc_q1,dc_q3,dc_outlier_count,pr_median,pr_q1,pr_q3,pr_outlier_count,"
         "f1_median,f1_q1,f1_q3,f1_outlier_count,hd_excluded,asd_excluded,"
         "lesion_pr_mean,lesion_rc_mean,lesion_f1_mean";
}

std::string summary_csv_row(const LossSummary& s) {
  std::ostringstream out;
  out << kind_name(s.kind) << ',' << s.n << ',' << text::format_real(s.dc_mean) << ','
      << text::format_real(s.jc_mean) << ',' << opt(s.hd_mean) << ',' << opt(s.asd_mean) << ','
      << text::format_real(s.pr_mean) << ',' << text::format_real(s.f1_mean) << ','
      << opt(s.dc_cv) << ',' << opt(s.pr_cv) << ',' << opt(s.f1_cv);
  box_fields(out, s.dc_box);
  box_fields(out, s.pr_box);
  box_fields(out, s.f1_box);
  out << ',' << s.hd_excluded << ',' << s.asd_excluded << ','
      << text::format_real(s.lesion_pr_mean) << ',' << text::format_real(s.lesion_rc_mean) << ','
      << text::format_real(s.lesion_f1_mean);
  return out.str();
}

std::string summary_csv(std::span<const LossSummary> summaries) {
  std::string out = summary_csv_header() + "\n";
  for (const auto& s : summaries) out += summary_csv_row(s) + "\n";
  return out;
}

}  // namespace segloss
