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

#include "segloss/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "segloss/error.hpp"
#include "segloss/text.hpp"

namespace segloss {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_same_geometry(const BinaryMask& a, const BinaryMask& b) {
  if (a.dims() != b.dims()) throw Error(ErrorCode::ShapeMismatch, "mask dims differ");
  if (a.spacing() != b.spacing()) throw Error(ErrorCode::ShapeMismatch, "mask spacing differs");
}

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

// Neighbour offsets; the first `half` entries precede the centre in linear order.
std::vector<Index3> neighbour_offsets(Connectivity connectivity) {
  std::vector<Index3> out;
  for (std::int64_t dz = -1; dz <= 1; ++dz) {
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        const auto manhattan = std::abs(dx) + std::abs(dy) + std::abs(dz);
        if (manhattan == 0) continue;
        if (connectivity == Connectivity::Six && manhattan != 1) continue;
        out.push_back({dx, dy, dz});
      }
    }
  }
  return out;  // generated in increasing linear offset order
}

// Squared distance transform along one line, Felzenszwalb-Huttenlocher lower
// envelope of parabolas in physical coordinates x_q = q * w.
void edt_line(const std::vector<double>& f, std::size_t n, double w, std::vector<std::size_t>& v,
              std::vector<double>& z, std::vector<double>& out) {
  auto intersect = [&](std::size_t q, std::size_t r) {
    const double xq = static_cast<double>(q) * w;
    const double xr = static_cast<double>(r) * w;
    return ((f[q] + xq * xq) - (f[r] + xr * xr)) / (2.0 * (xq - xr));
  };
  std::ptrdiff_t k = -1;
  for (std::size_t q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s = intersect(q, v[k]);
    while (s <= z[k]) {
      --k;
      s = intersect(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n), kInf);
    return;
  }
  std::ptrdiff_t j = 0;
  for (std::size_t q = 0; q < n; ++q) {
    const double xq = static_cast<double>(q) * w;
    while (z[j + 1] < xq) ++j;
    const double d = (static_cast<double>(q) - static_cast<double>(v[j])) * w;
    out[q] = d * d + f[v[j]];
  }
}

// Exact squared Euclidean distance (mm^2) from every voxel of `geometry` to
// the nearest feature point.
std::vector<double> squared_edt(const Geometry& geometry, const std::vector<Index3>& features) {
  const auto& dims = geometry.dims;
  std::vector<double> dist(geometry.voxel_count(), kInf);
  for (const auto& c : features) {
    dist[geometry.index(static_cast<std::size_t>(c[0]), static_cast<std::size_t>(c[1]),
                        static_cast<std::size_t>(c[2]))] = 0.0;
  }
  const std::size_t longest = std::max({dims[0], dims[1], dims[2]});
  std::vector<double> line(longest), result(longest), z(longest + 1);
  std::vector<std::size_t> v(longest);
  const std::size_t strides[3] = {1, dims[0], dims[0] * dims[1]};

  for (int axis = 0; axis < 3; ++axis) {
    const std::size_t n = dims[axis];
    const std::size_t stride = strides[axis];
    const int a1 = (axis + 1) % 3;
    const int a2 = (axis + 2) % 3;
    for (std::size_t i2 = 0; i2 < dims[a2]; ++i2) {
      for (std::size_t i1 = 0; i1 < dims[a1]; ++i1) {
        const std::size_t base = i1 * strides[a1] + i2 * strides[a2];
        for (std::size_t q = 0; q < n; ++q) line[q] = dist[base + q * stride];
        edt_line(line, n, geometry.spacing[axis], v, z, result);
        for (std::size_t q = 0; q < n; ++q) dist[base + q * stride] = result[q];
      }
    }
  }
  return dist;
}

// Nearest distance (mm) from every point of `from` to the set `to`.
std::vector<double> nearest_distances(const SurfacePointSet& from, const SurfacePointSet& to) {
  Geometry g;
  g.spacing = to.spacing;
  for (int a = 0; a < 3; ++a) g.dims[a] = std::max<std::size_t>({from.extent[a], to.extent[a], 1});
  const auto dist = squared_edt(g, to.points);
  std::vector<double> out;
  out.reserve(from.points.size());
  for (const auto& c : from.points) {
    out.push_back(std::sqrt(dist[g.index(static_cast<std::size_t>(c[0]),
                                         static_cast<std::size_t>(c[1]),
                                         static_cast<std::size_t>(c[2]))]));
  }
  return out;
}

void check_surfaces(const SurfacePointSet& a, const SurfacePointSet& b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptySurface, "surface point set is empty");
  if (a.spacing != b.spacing) throw Error(ErrorCode::ShapeMismatch, "surface spacings differ");
  for (const auto* s : {&a, &b}) {
    for (const auto& c : s->points) {
      for (int k = 0; k < 3; ++k) {
        if (c[k] < 0 || c[k] >= static_cast<std::int64_t>(s->extent[k])) {
          throw Error(ErrorCode::InvalidArgument, "surface point outside its extent");
        }
      }
    }
  }
}

std::string optional_field(const std::optional<double>& v) {
  return v ? text::format_real(*v) : std::string();
}

}  // namespace

Connectivity parse_connectivity(int neighbours) {
  if (neighbours == 6) return Connectivity::Six;
  if (neighbours == 26) return Connectivity::TwentySix;
  throw Error(ErrorCode::InvalidArgument, "connectivity must be 6 or 26");
}

SurfacePointSet SurfacePointSet::from_points(std::vector<Index3> points, Spacing spacing) {
  SurfacePointSet out;
  out.spacing = spacing;
  for (const auto& c : points) {
    for (int a = 0; a < 3; ++a) {
      if (c[a] < 0) throw Error(ErrorCode::InvalidArgument, "negative surface coordinate");
      out.extent[a] = std::max(out.extent[a], static_cast<std::size_t>(c[a]) + 1);
    }
  }
  out.points = std::move(points);
  return out;
}

OverlapMetrics overlap_metrics(const BinaryMask& gt, const BinaryMask& pred) {
  check_same_geometry(gt, pred);
  double tp = 0.0, fp = 0.0, fn = 0.0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const bool g = gt[i] != 0;
    const bool p = pred[i] != 0;
    tp += static_cast<double>(g && p);
    fp += static_cast<double>(!g && p);
    fn += static_cast<double>(g && !p);
  }
  if (tp + fp + fn == 0.0) return {1.0, 1.0, 1.0, 1.0, 1.0};
  OverlapMetrics m;
  m.dc = 2.0 * tp / (2.0 * tp + fp + fn);
  m.jc = tp / (tp + fp + fn);
  m.pr = safe_ratio(tp, tp + fp);
  m.rc = safe_ratio(tp, tp + fn);
  // harmonic mean of pr and rc, written in count form
  m.f1 = m.dc;
  return m;
}

SurfacePointSet surface_extract(const BinaryMask& mask, Connectivity connectivity) {
  const auto& g = mask.geometry();
  const auto offsets = neighbour_offsets(connectivity);
  SurfacePointSet out;
  out.spacing = g.spacing;
  out.extent = g.dims;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    const auto c = g.coord(i);
    const bool on_surface = std::any_of(offsets.begin(), offsets.end(), [&](const Index3& o) {
      const Index3 n{c[0] + o[0], c[1] + o[1], c[2] + o[2]};
      if (!g.contains(n)) return true;
      return mask[g.index(static_cast<std::size_t>(n[0]), static_cast<std::size_t>(n[1]),
                          static_cast<std::size_t>(n[2]))] == 0;
    });
    if (on_surface) out.points.push_back(c);
  }
  return out;
}

double hausdorff(const SurfacePointSet& a, const SurfacePointSet& b) {
  check_surfaces(a, b);
  const auto ab = nearest_distances(a, b);
  const auto ba = nearest_distances(b, a);
  return std::max(*std::max_element(ab.begin(), ab.end()), *std::max_element(ba.begin(), ba.end()));
}

double asd(const SurfacePointSet& a, const SurfacePointSet& b) {
  check_surfaces(a, b);
  const auto ab = nearest_distances(a, b);
  const auto ba = nearest_distances(b, a);
  const double total = std::accumulate(ab.begin(), ab.end(), 0.0) +
                       std::accumulate(ba.begin(), ba.end(), 0.0);
  return total / static_cast<double>(ab.size() + ba.size());
}

LabelGrid connected_components(const BinaryMask& mask, Connectivity connectivity) {
  const auto& g = mask.geometry();
  const std::size_t n = mask.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&parent](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };

  auto offsets = neighbour_offsets(connectivity);
  offsets.resize(offsets.size() / 2);  // only neighbours already visited

  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    const auto c = g.coord(i);
    for (const auto& o : offsets) {
      const Index3 nb{c[0] + o[0], c[1] + o[1], c[2] + o[2]};
      if (!g.contains(nb)) continue;
      const auto j = g.index(static_cast<std::size_t>(nb[0]), static_cast<std::size_t>(nb[1]),
                             static_cast<std::size_t>(nb[2]));
      if (!mask[j]) continue;
      const auto ri = find(i);
      const auto rj = find(j);
      if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
    }
  }

  LabelGrid out;
  out.geometry = g;
  out.labels.assign(n, 0);
  std::vector<std::uint32_t> root_label(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    const auto r = find(i);
    if (root_label[r] == 0) root_label[r] = ++out.count;
    out.labels[i] = root_label[r];
  }
  return out;
}

LesionMetrics lesion_detection_metrics(const BinaryMask& gt, const BinaryMask& pred,
                                       double min_overlap, Connectivity connectivity) {
  check_same_geometry(gt, pred);
  if (!(min_overlap > 0.0 && min_overlap <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "min_overlap must lie in (0, 1]");
  }
  const auto gl = connected_components(gt, connectivity);
  const auto pl = connected_components(pred, connectivity);
  if (gl.count == 0 && pl.count == 0) return {1.0, 1.0, 1.0};

  std::vector<std::size_t> gt_size(gl.count + 1, 0);
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> overlap;
  for (std::size_t i = 0; i < gl.labels.size(); ++i) {
    const auto a = gl.labels[i];
    const auto b = pl.labels[i];
    if (a) ++gt_size[a];
    if (a && b) ++overlap[{a, b}];
  }
  std::vector<bool> detected(gl.count + 1, false), hit(pl.count + 1, false);
  for (const auto& [key, count] : overlap) {
    const auto [a, b] = key;
    hit[b] = true;
    if (static_cast<double>(count) >= min_overlap * static_cast<double>(gt_size[a])) {
      detected[a] = true;
    }
  }
  const double n_detected = static_cast<double>(std::count(detected.begin(), detected.end(), true));
  const double n_hit = static_cast<double>(std::count(hit.begin(), hit.end(), true));
  LesionMetrics m;
  m.rc = safe_ratio(n_detected, gl.count);
  m.pr = safe_ratio(n_hit, pl.count);
  m.f1 = safe_ratio(2.0 * m.pr * m.rc, m.pr + m.rc);
  return m;
}

MetricReport full_report(const BinaryMask& gt, const BinaryMask& pred,
                         const ReportOptions& options) {
  const auto o = overlap_metrics(gt, pred);
  MetricReport r;
  r.dc = o.dc;
  r.jc = o.jc;
  r.voxel_pr = o.pr;
  r.voxel_rc = o.rc;
  r.voxel_f1 = o.f1;
  const auto sg = surface_extract(gt, options.surface_connectivity);
  const auto sp = surface_extract(pred, options.surface_connectivity);
  if (!sg.empty() && !sp.empty()) {
    r.hd = hausdorff(sp, sg);
    r.asd = asd(sp, sg);
  }
  const auto l = lesion_detection_metrics(gt, pred, options.min_overlap,
                                          options.lesion_connectivity);
  r.lesion_pr = l.pr;
  r.lesion_rc = l.rc;
  r.lesion_f1 = l.f1;
  return r;
}

MetricReport full_report(const BinaryMask& gt, const ProbGrid& pred_prob,
                         const ReportOptions& options) {
  if (gt.dims() != pred_prob.dims() || gt.spacing() != pred_prob.geometry().spacing) {
    throw Error(ErrorCode::ShapeMismatch, "ground truth and prediction geometry differ");
  }
  return full_report(gt, binarize(pred_prob, options.threshold), options);
}

std::string metric_csv_header() {
  return "case_id,dc,jc,hd,asd,voxel_pr,voxel_rc,voxel_f1,lesion_pr,lesion_rc,lesion_f1";
}

std::string metric_csv_row(std::string_view case_id, const MetricReport& r) {
  std::ostringstream out;
  out << case_id << ',' << text::format_real(r.dc) << ',' << text::format_real(r.jc) << ','
      << optional_field(r.hd) << ',' << optional_field(r.asd) << ','
      << text::format_real(r.voxel_pr) << ',' << text::format_real(r.voxel_rc) << ','
      << text::format_real(r.voxel_f1) << ',' << text::format_real(r.lesion_pr) << ','
      << text::format_real(r.lesion_rc) << ',' << text::format_real(r.lesion_f1);
  return out.str();
}

MetricReport parse_metric_fields(const std::vector<std::string>& f, std::size_t offset) {
  if (f.size() < offset + 10) throw Error(ErrorCode::ParseError, "metric row has too few fields");
  auto opt = [](const std::string& s) -> std::optional<double> {
    if (text::trim(s).empty()) return std::nullopt;
    return text::parse_real(s);
  };
  MetricReport r;
  r.dc = text::parse_real(f[offset + 0]);
  r.jc = text::parse_real(f[offset + 1]);
  r.hd = opt(f[offset + 2]);
  r.asd = opt(f[offset + 3]);
  r.voxel_pr = text::parse_real(f[offset + 4]);
  r.voxel_rc = text::parse_real(f[offset + 5]);
  r.voxel_f1 = text::parse_real(f[offset + 6]);
  r.lesion_pr = text::parse_real(f[offset + 7]);
  r.lesion_rc = text::parse_real(f[offset + 8]);
  r.lesion_f1 = text::parse_real(f[offset + 9]);
  return r;
}

std::string metric_json(std::string_view case_id, const MetricReport& r) {
  nlohmann::ordered_json j;
  j["case_id"] = std::string(case_id);
  j["dc"] = r.dc;
  j["jc"] = r.jc;
  j["hd"] = r.hd ? nlohmann::ordered_json(*r.hd) : nlohmann::ordered_json(nullptr);
  j["asd"] = r.asd ? nlohmann::ordered_json(*r.asd) : nlohmann::ordered_json(nullptr);
  j["voxel_pr"] = r.voxel_pr;
  j["voxel_rc"] = r.voxel_rc;
  j["voxel_f1"] = r.voxel_f1;
  j["lesion_pr"] = r.lesion_pr;
  j["lesion_rc"] = r.lesion_rc;
  j["lesion_f1"] = r.lesion_f1;
  return j.dump(2);
}

}  // namespace segloss
