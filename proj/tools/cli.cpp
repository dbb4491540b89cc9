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

#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "segloss/error.hpp"
#include "segloss/gradcheck.hpp"
#include "segloss/losses.hpp"
#include "segloss/metrics.hpp"
#include "segloss/rng.hpp"
#include "segloss/stats.hpp"
#include "segloss/synth.hpp"
#include "segloss/text.hpp"
#include "segloss/trainer.hpp"
#include "segloss/volume_io.hpp"

namespace segloss::cli {
namespace {

namespace fs = std::filesystem;

// Validation failures detected by the CLI itself, before any IO.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void usage_check(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

Dims parse_dims(const std::string& s, const char* flag) {
  const auto parts = text::split(s, ',');
  usage_check(parts.size() == 3, std::string(flag) + " expects X,Y,Z");
  Dims d{};
  for (int k = 0; k < 3; ++k) {
    const auto v = text::parse_int(parts[k]);
    usage_check(v > 0, std::string(flag) + " components must be positive");
    d[k] = static_cast<std::size_t>(v);
  }
  return d;
}

std::vector<LossKind> parse_kinds(const std::string& s) {
  if (text::to_lower(text::trim(s)) == "all") {
    return {kAllLossKinds.begin(), kAllLossKinds.end()};
  }
  std::vector<LossKind> kinds;
  for (const auto& name : text::split(s, ',')) {
    if (text::trim(name).empty()) continue;
    const auto k = parse_kind(name);
    if (std::find(kinds.begin(), kinds.end(), k) == kinds.end()) kinds.push_back(k);
  }
  usage_check(!kinds.empty(), "no loss kinds given");
  return kinds;
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

bool is_json_path(const fs::path& path) { return text::to_lower(path.extension().string()) == ".json"; }

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string gt, pred, out, case_id;
  double threshold = kDefaultThreshold;
  double min_overlap = 0.1;
  int surface_conn = 6;
  int lesion_conn = 26;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  ReportOptions opts;
  usage_check(a.threshold > 0.0 && a.threshold < 1.0, "--threshold must lie in (0, 1)");
  usage_check(a.min_overlap > 0.0 && a.min_overlap <= 1.0, "--min-overlap must lie in (0, 1]");
  opts.threshold = a.threshold;
  opts.min_overlap = a.min_overlap;
  opts.surface_connectivity = parse_connectivity(a.surface_conn);
  opts.lesion_connectivity = parse_connectivity(a.lesion_conn);

  const auto gt = read_mask(a.gt);
  const auto pred_grid = read_volume(a.pred);
  if (gt.dims() != pred_grid.dims() || gt.spacing() != pred_grid.spacing()) {
    throw Error(ErrorCode::ShapeMismatch, a.pred + " does not match the geometry of " + a.gt);
  }
  const ProbGrid pred(pred_grid);
  const auto report = full_report(gt, pred, opts);
  const auto id = a.case_id.empty() ? fs::path(a.gt).stem().string() : a.case_id;

  const fs::path out_path(a.out);
  if (is_json_path(out_path)) {
    write_text(out_path, metric_json(id, report) + "\n");
  } else {
    write_text(out_path, metric_csv_header() + "\n" + metric_csv_row(id, report) + "\n");
  }
  out << metric_csv_row(id, report) << '\n';
  return kOk;
}

// ---------------------------------------------------------------- loss

struct SpecArgs {
  std::optional<double> alpha, beta, gamma, focal_exp, pos_weight, smooth, clamp_eps;
  std::string mce_variant;
};

void add_spec_flags(CLI::App* app, SpecArgs& s) {
  app->add_option("--alpha", s.alpha, "Tversky false-negative weight in (0,1)");
  app->add_option("--beta", s.beta, "mCE positive-class weight in (0,1)");
  app->add_option("--gamma", s.gamma, "hybrid mixing weight in [0,1]");
  app->add_option("--focal-exp", s.focal_exp, "focal exponent");
  app->add_option("--pos-weight", s.pos_weight, "WeightedCE positive weight");
  app->add_option("--smooth", s.smooth, "overlap smoothing constant");
  app->add_option("--clamp-eps", s.clamp_eps, "probability clamp before logs");
  app->add_option("--mce-variant", s.mce_variant, "canonical | as-printed");
}

LossSpec build_spec(LossKind kind, const SpecArgs& s) {
  auto spec = LossSpec::defaults(kind);
  if (s.alpha) spec.alpha = *s.alpha;
  if (s.beta) spec.beta = *s.beta;
  if (s.gamma) spec.gamma = *s.gamma;
  if (s.focal_exp) spec.focal_exp = *s.focal_exp;
  if (s.pos_weight) spec.pos_weight = *s.pos_weight;
  if (s.smooth) spec.smooth = *s.smooth;
  if (s.clamp_eps) spec.clamp_eps = *s.clamp_eps;
  if (!s.mce_variant.empty()) spec.mce_variant = parse_variant(s.mce_variant);
  spec.validate();
  return spec;
}

struct LossArgs {
  std::string kind, gt, pred, grad_out;
  SpecArgs spec;
};

int cmd_loss(const LossArgs& a, std::ostream& out) {
  const auto spec = build_spec(parse_kind(a.kind), a.spec);
  const auto y = read_mask(a.gt);
  const auto grid = read_volume(a.pred);
  if (y.dims() != grid.dims()) {
    throw Error(ErrorCode::ShapeMismatch, a.pred + " does not match the dims of " + a.gt);
  }
  const auto eval = loss_eval(spec, y, ProbGrid(grid));
  if (!a.grad_out.empty()) write_volume(VoxelGrid(grid.geometry(), eval.grad), a.grad_out);
  out << format_spec(spec) << " value=" << text::format_real(eval.value) << '\n';
  return kOk;
}

// ---------------------------------------------------------------- gradcheck

struct GradArgs {
  std::string kinds = "all";
  std::uint64_t seed = 42;
  std::size_t trials = 20;
  double rel_tol = 1e-4;
  double abs_tol = 1e-7;
  double step = 1e-4;
  bool corrupt = false;
};

int cmd_gradcheck(const GradArgs& a, std::ostream& out) {
  usage_check(a.trials >= 1, "--trials must be >= 1");
  usage_check(a.step > 0.0 && a.step < 0.025, "--step must lie in (0, 0.025)");
  usage_check(a.rel_tol > 0.0 && a.abs_tol >= 0.0, "tolerances must be positive");
  const auto kinds = parse_kinds(a.kinds);
  GradCheckOptions opts;
  opts.trials = a.trials;
  opts.seed = a.seed;
  opts.rel_tol = a.rel_tol;
  opts.abs_tol = a.abs_tol;
  opts.step = a.step;
  opts.corrupt_gradient = a.corrupt;
  bool all_passed = true;
  for (auto kind : kinds) {
    const auto report = grad_check(LossSpec::defaults(kind), opts);
    all_passed = all_passed && report.passed;
    out << (report.passed ? "PASS " : "FAIL ") << format_report(report) << '\n';
  }
  return all_passed ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::uint64_t seed = 0;
  std::size_t cases = 1;
  std::string out;
  std::string dims = "48,48,48";
  std::size_t new_lesions = 2;
  std::size_t old_lesions = 3;
  double noise = 0.05;
  bool blobs = false;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  usage_check(a.cases >= 1, "--cases must be >= 1");
  PhantomConfig cfg;
  cfg.dims = parse_dims(a.dims, "--dims");
  cfg.n_new_lesions = a.new_lesions;
  cfg.n_old_lesions = a.old_lesions;
  cfg.noise_sigma = a.noise;
  cfg.asymmetric_blobs = a.blobs;
  cfg.validate();

  // generate everything first so a placement failure leaves no partial output
  std::vector<std::pair<LongitudinalCase, std::uint64_t>> cases;
  for (std::size_t i = 0; i < a.cases; ++i) {
    const auto seed = derive_seed(a.seed, i);
    char id[32];
    std::snprintf(id, sizeof(id), "case_%03zu", i);
    cases.emplace_back(gen_phantom(cfg, seed, id), seed);
  }
  for (const auto& [c, seed] : cases) {
    write_case(fs::path(a.out) / c.case_id, c, cfg, seed);
    out << c.case_id << " new_voxels=" << c.new_lesion_mask.count() << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string losses;
  std::size_t cases = 4;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t iterations = 250;
  double lr = 0.001;
  std::size_t batch = 4;
  std::string patch = "32,32,32";
  std::string dims = "48,48,48";
  double noise = 0.0;
  std::string optimizer = "adam";
  double threshold = kDefaultThreshold;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  usage_check(a.cases >= 1, "--cases must be >= 1");
  usage_check(a.iterations >= 1 && a.batch >= 1, "--iterations and --batch must be >= 1");
  usage_check(a.lr >= 0.0, "--lr must be nonnegative");
  usage_check(a.threshold > 0.0 && a.threshold < 1.0, "--threshold must lie in (0, 1)");
  const auto kinds = parse_kinds(a.losses);
  PhantomConfig phantom;
  phantom.dims = parse_dims(a.dims, "--dims");
  phantom.noise_sigma = a.noise;
  phantom.validate();
  TrainConfig cfg;
  cfg.learning_rate = a.lr;
  cfg.iterations = a.iterations;
  cfg.batch_size = a.batch;
  cfg.patch_dims = parse_dims(a.patch, "--patch");
  cfg.optimizer = parse_optimizer(a.optimizer);
  cfg.seed = derive_seed(a.seed, 2);
  cfg.report.threshold = a.threshold;
  cfg.validate();
  for (int k = 0; k < 3; ++k) {
    usage_check(cfg.patch_dims[k] <= phantom.dims[k], "--patch must fit inside --dims");
  }

  std::vector<LongitudinalCase> train, heldout;
  for (std::size_t i = 0; i < a.cases; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "train_%03zu", i);
    train.push_back(gen_phantom(phantom, derive_seed(a.seed, 0, i), id));
    std::snprintf(id, sizeof(id), "case_%03zu", i);
    heldout.push_back(gen_phantom(phantom, derive_seed(a.seed, 1, i), id));
  }

  const fs::path dir(a.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string());
  std::ofstream cases_csv(dir / "cases.csv", std::ios::binary | std::ios::trunc);
  if (!cases_csv) throw Error(ErrorCode::IoFailure, "cannot write " + (dir / "cases.csv").string());
  cases_csv << case_csv_header() << '\n' << std::flush;

  std::vector<CaseRow> rows;
  for (auto kind : kinds) {
    const auto history = train_toy(train, LossSpec::defaults(kind), cfg, heldout);
    for (std::size_t i = 0; i < history.holdout_reports.size(); ++i) {
      CaseRow row{kind, history.holdout_ids[i], history.holdout_reports[i]};
      cases_csv << case_csv_row(row) << '\n';
      rows.push_back(std::move(row));
    }
    cases_csv.flush();
    const auto last = history.losses.empty() ? 0.0 : history.losses.back();
    out << "loss=" << kind_name(kind) << " iterations=" << history.losses.size()
        << " final_loss=" << text::format_real(last) << (history.diverged ? " diverged=true" : "")
        << '\n';
  }
  if (!cases_csv) throw Error(ErrorCode::IoFailure, "write failed for cases.csv");
  const auto summaries = aggregate_report(rows);
  write_text(dir / "summary.csv", summary_csv(summaries));
  return kOk;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
  std::string in, out;
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
  fs::path in(a.in);
  if (fs::is_directory(in)) in /= "cases.csv";
  const auto rows = read_case_csv(in);
  const auto summaries = aggregate_report(rows);
  write_text(a.out, summary_csv(summaries));
  out << "summarised " << rows.size() << " rows into " << summaries.size() << " losses\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"segloss: segmentation loss laboratory"};
  app.require_subcommand(1);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score a prediction against a ground-truth mask");
  eval_cmd->add_option("--gt", eval.gt, "ground-truth mask (.segv)")->required();
  eval_cmd->add_option("--pred", eval.pred, "prediction probabilities or mask (.segv)")->required();
  eval_cmd->add_option("--threshold", eval.threshold, "binarisation threshold");
  eval_cmd->add_option("--min-overlap", eval.min_overlap, "lesion detection overlap fraction");
  eval_cmd->add_option("--surface-connectivity", eval.surface_conn, "6 or 26");
  eval_cmd->add_option("--lesion-connectivity", eval.lesion_conn, "6 or 26");
  eval_cmd->add_option("--case-id", eval.case_id, "row label (default: gt file stem)");
  eval_cmd->add_option("--out", eval.out, "output path (.csv or .json)")->required();

  LossArgs loss;
  auto* loss_cmd = app.add_subcommand("loss", "Evaluate one loss on a (mask, probability) pair");
  loss_cmd->add_option("--kind", loss.kind, "loss kind")->required();
  loss_cmd->add_option("--gt", loss.gt, "ground-truth mask (.segv)")->required();
  loss_cmd->add_option("--pred", loss.pred, "probabilities (.segv)")->required();
  loss_cmd->add_option("--grad-out", loss.grad_out, "write dL/dp as a float volume");
  add_spec_flags(loss_cmd, loss.spec);

  GradArgs grad;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference check of analytic gradients");
  grad_cmd->add_option("--kinds", grad.kinds, "comma list or 'all'");
  grad_cmd->add_option("--seed", grad.seed);
  grad_cmd->add_option("--trials", grad.trials);
  grad_cmd->add_option("--rel-tol", grad.rel_tol);
  grad_cmd->add_option("--abs-tol", grad.abs_tol);
  grad_cmd->add_option("--step", grad.step);
  grad_cmd->add_flag("--corrupt-gradient", grad.corrupt)->group("");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write synthetic longitudinal phantom cases");
  synth_cmd->add_option("--seed", synth.seed)->required();
  synth_cmd->add_option("--cases", synth.cases)->required();
  synth_cmd->add_option("--out", synth.out, "output directory")->required();
  synth_cmd->add_option("--dims", synth.dims, "X,Y,Z");
  synth_cmd->add_option("--new-lesions", synth.new_lesions);
  synth_cmd->add_option("--old-lesions", synth.old_lesions);
  synth_cmd->add_option("--noise", synth.noise, "Gaussian noise sigma");
  synth_cmd->add_flag("--blobs", synth.blobs, "asymmetric multi-ellipsoid lesions");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Train each loss on a phantom suite and score it");
  bench_cmd->add_option("--losses", bench.losses, "comma list or 'all'")->required();
  bench_cmd->add_option("--cases", bench.cases)->required();
  bench_cmd->add_option("--seed", bench.seed)->required();
  bench_cmd->add_option("--out", bench.out, "output directory")->required();
  bench_cmd->add_option("--iterations", bench.iterations);
  bench_cmd->add_option("--lr", bench.lr);
  bench_cmd->add_option("--batch", bench.batch);
  bench_cmd->add_option("--patch", bench.patch, "X,Y,Z");
  bench_cmd->add_option("--dims", bench.dims, "phantom X,Y,Z");
  bench_cmd->add_option("--noise", bench.noise, "phantom noise sigma (0 = easy suite)");
  bench_cmd->add_option("--optimizer", bench.optimizer, "adam | sgd");
  bench_cmd->add_option("--threshold", bench.threshold);

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Summarise a per-case CSV");
  report_cmd->add_option("--in", report.in, "bench directory or cases.csv")->required();
  report_cmd->add_option("--out", report.out, "summary CSV path")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }

  try {
    if (*eval_cmd) return cmd_eval(eval, out);
    if (*loss_cmd) return cmd_loss(loss, out);
    if (*grad_cmd) return cmd_gradcheck(grad, out);
    if (*synth_cmd) return cmd_synth(synth, out);
    if (*bench_cmd) return cmd_bench(bench, out);
    if (*report_cmd) return cmd_report(report, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.is_io() ? kIoError : kValidationError;
  }
  return kValidationError;
}

}  // namespace segloss::cli
