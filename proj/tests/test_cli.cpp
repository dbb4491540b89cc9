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
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "segloss/metrics.hpp"
#include "segloss/synth.hpp"
#include "segloss/text.hpp"
#include "segloss/volume_io.hpp"
#include "test_util.hpp"

namespace segloss {
namespace {

namespace fs = std::filesystem;
using testing::scratch_dir;
using testing::slurp;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

std::vector<std::string> bench_args(const fs::path& out, const std::string& losses) {
  return {"bench", "--losses", losses, "--cases", "4", "--seed", "1", "--out", out.string(),
          "--dims", "32,32,32", "--patch", "16,16,16", "--iterations", "5"};
}

TEST(Cli, HelpAndUsage) {
  EXPECT_EQ(run_cli({"--help"}).code, cli::kOk);
  EXPECT_EQ(run_cli({}).code, cli::kValidationError);
  EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kValidationError);
  EXPECT_EQ(run_cli({"eval", "--gt", "x.segv"}).code, cli::kValidationError);
}

TEST(Cli, EvalIdenticalMasks) {
  const auto dir = scratch_dir("cli_eval");
  BinaryMask m({6, 6, 6}, {1, 1, 1}, std::vector<std::uint8_t>(216, 0));
  std::vector<std::uint8_t> v(216, 0);
  v[50] = v[51] = v[57] = 1;
  BinaryMask gt({6, 6, 6}, {1, 1, 1}, v);
  write_volume(gt, dir / "gt.segv");
  auto r = run_cli({"eval", "--gt", (dir / "gt.segv").string(), "--pred",
                    (dir / "gt.segv").string(), "--out", (dir / "r.csv").string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto csv = slurp(dir / "r.csv");
  EXPECT_EQ(line_count(csv), 2u);
  EXPECT_NE(csv.find("gt,1,1,0,0,1,1,1,1,1,1"), std::string::npos) << csv;

  r = run_cli({"eval", "--gt", (dir / "gt.segv").string(), "--pred", (dir / "gt.segv").string(),
               "--out", (dir / "r.json").string()});
  ASSERT_EQ(r.code, cli::kOk);
  EXPECT_NE(slurp(dir / "r.json").find("\"dc\": 1"), std::string::npos);
}

TEST(Cli, EvalMatchesLibrary) {
  const auto dir = scratch_dir("cli_eval_lib");
  PhantomConfig cfg;
  cfg.dims = {32, 32, 32};
  auto c = gen_phantom(cfg, 12);
  // a noisy "prediction": follow-up intensity squashed into [0, 1]
  std::vector<double> p(c.followup.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::clamp(c.followup[i] - 0.2, 0.0, 1.0);
  VoxelGrid pg(c.followup.geometry(), p);
  write_volume(c.new_lesion_mask, dir / "gt.segv");
  write_volume(pg, dir / "pred.segv");
  auto r = run_cli({"eval", "--gt", (dir / "gt.segv").string(), "--pred",
                    (dir / "pred.segv").string(), "--out", (dir / "r.csv").string(),
                    "--case-id", "x"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto prob = ProbGrid(read_volume(dir / "pred.segv"));
  const auto gt = read_mask(dir / "gt.segv");
  // spacing is stored as float32
  const auto expected = metric_csv_row("x", full_report(gt, prob));
  EXPECT_NE(slurp(dir / "r.csv").find(expected), std::string::npos);
}

TEST(Cli, EvalErrors) {
  const auto dir = scratch_dir("cli_eval_err");
  write_volume(BinaryMask({2, 2, 2}, {1, 1, 1}, std::vector<std::uint8_t>(8, 1)), dir / "a.segv");
  write_volume(BinaryMask({2, 2, 3}, {1, 1, 1}, std::vector<std::uint8_t>(12, 1)), dir / "b.segv");
  {
    std::ofstream junk(dir / "junk.segv");
    junk << "XXXXnot a volume at all, definitely";
  }
  const auto out = (dir / "r.csv").string();
  auto mismatch = run_cli({"eval", "--gt", (dir / "a.segv").string(), "--pred",
                           (dir / "b.segv").string(), "--out", out});
  EXPECT_EQ(mismatch.code, cli::kValidationError);
  EXPECT_FALSE(fs::exists(out));

  auto missing = run_cli({"eval", "--gt", (dir / "nope.segv").string(), "--pred",
                          (dir / "a.segv").string(), "--out", out});
  EXPECT_EQ(missing.code, cli::kIoError);
  EXPECT_NE(missing.err.find("nope.segv"), std::string::npos) << missing.err;

  auto bad = run_cli({"eval", "--gt", (dir / "junk.segv").string(), "--pred",
                      (dir / "a.segv").string(), "--out", out});
  EXPECT_EQ(bad.code, cli::kIoError);
  EXPECT_NE(bad.err.find("junk.segv"), std::string::npos);

  auto thr = run_cli({"eval", "--gt", (dir / "a.segv").string(), "--pred",
                      (dir / "a.segv").string(), "--threshold", "1.5", "--out", out});
  EXPECT_EQ(thr.code, cli::kValidationError);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, LossCommand) {
  const auto dir = scratch_dir("cli_loss");
  write_volume(BinaryMask({2, 1, 1}, {1, 1, 1}, {1, 0}), dir / "y.segv");
  write_volume(VoxelGrid({2, 1, 1}, {1, 1, 1}, {0.75, 0.25}), dir / "p.segv");
  auto r = run_cli({"loss", "--kind", "tversky", "--alpha", "0.3", "--smooth", "0", "--gt",
                    (dir / "y.segv").string(), "--pred", (dir / "p.segv").string(), "--grad-out",
                    (dir / "g.segv").string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find("kind=tversky alpha=0.3"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("value=0.25"), std::string::npos) << r.out;
  EXPECT_EQ(read_volume(dir / "g.segv").size(), 2u);

  auto variant = run_cli({"loss", "--kind", "hytver", "--mce-variant", "as-printed", "--gt",
                          (dir / "y.segv").string(), "--pred", (dir / "p.segv").string()});
  EXPECT_EQ(variant.code, cli::kOk) << variant.err;
  EXPECT_NE(variant.out.find("mce_variant=as_printed"), std::string::npos);

  EXPECT_EQ(run_cli({"loss", "--kind", "nope", "--gt", (dir / "y.segv").string(), "--pred",
                     (dir / "p.segv").string()})
                .code,
            cli::kValidationError);
  EXPECT_EQ(run_cli({"loss", "--kind", "dice", "--alpha", "2", "--gt", (dir / "y.segv").string(),
                     "--pred", (dir / "p.segv").string()})
                .code,
            cli::kValidationError);
}

TEST(Cli, Gradcheck) {
  auto one = run_cli({"gradcheck", "--kinds", "hytver", "--trials", "3"});
  EXPECT_EQ(one.code, cli::kOk);
  EXPECT_EQ(line_count(one.out), 1u);
  EXPECT_EQ(one.out.rfind("PASS kind=hytver", 0), 0u) << one.out;

  auto two = run_cli({"gradcheck", "--kinds", "dice,focal_tversky", "--trials", "2"});
  EXPECT_EQ(two.code, cli::kOk);
  EXPECT_EQ(line_count(two.out), 2u);

  auto corrupt = run_cli({"gradcheck", "--kinds", "hytver", "--trials", "2", "--corrupt-gradient"});
  EXPECT_EQ(corrupt.code, cli::kCheckFailed);
  EXPECT_EQ(corrupt.out.rfind("FAIL", 0), 0u);

  EXPECT_EQ(run_cli({"gradcheck", "--kinds", "bogus"}).code, cli::kValidationError);
}

TEST(Cli, SynthDeterministic) {
  const auto a = scratch_dir("cli_synth_a");
  const auto b = scratch_dir("cli_synth_b");
  for (const auto& d : {a, b}) {
    auto r = run_cli({"synth", "--seed", "9", "--cases", "2", "--out", d.string(), "--dims",
                      "24,24,24", "--new-lesions", "1", "--noise", "0.1"});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
  }
  for (const auto* name : {"baseline.segv", "followup.segv", "mask.segv", "case.json"}) {
    EXPECT_EQ(slurp(a / "case_000" / name), slurp(b / "case_000" / name)) << name;
    EXPECT_TRUE(fs::exists(a / "case_001" / name));
  }
  EXPECT_NE(slurp(a / "case_000" / "followup.segv"), slurp(a / "case_001" / "followup.segv"));
  auto back = read_case(a / "case_001");
  EXPECT_EQ(connected_components(back.new_lesion_mask).count, 1u);
}

TEST(Cli, SynthValidatesBeforeWriting) {
  const auto root = scratch_dir("cli_synth_bad");
  const auto out = root / "never";
  EXPECT_EQ(run_cli({"synth", "--seed", "1", "--cases", "2", "--out", out.string(), "--dims",
                     "0,24,24"})
                .code,
            cli::kValidationError);
  EXPECT_EQ(run_cli({"synth", "--seed", "1", "--cases", "2", "--out", out.string(), "--noise",
                     "-1"})
                .code,
            cli::kValidationError);
  // lesions that cannot be placed: nothing is written for any case
  EXPECT_EQ(run_cli({"synth", "--seed", "1", "--cases", "2", "--out", out.string(), "--dims",
                     "16,16,16", "--new-lesions", "40"})
                .code,
            cli::kValidationError);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, BenchRowsAndDeterminism) {
  const auto a = scratch_dir("cli_bench_a");
  const auto b = scratch_dir("cli_bench_b");
  auto ra = run_cli(bench_args(a, "dice,hytver"));
  ASSERT_EQ(ra.code, cli::kOk) << ra.err;
  ASSERT_EQ(run_cli(bench_args(b, "dice,hytver")).code, cli::kOk);

  const auto cases = slurp(a / "cases.csv");
  const auto summary = slurp(a / "summary.csv");
  EXPECT_EQ(line_count(cases), 1u + 8u);
  EXPECT_EQ(line_count(summary), 1u + 2u);
  EXPECT_EQ(cases, slurp(b / "cases.csv"));
  EXPECT_EQ(summary, slurp(b / "summary.csv"));

  // report recomputes the same summary from the per-case file
  const auto out = a / "again.csv";
  ASSERT_EQ(run_cli({"report", "--in", a.string(), "--out", out.string()}).code, cli::kOk);
  EXPECT_EQ(slurp(out), summary);
  ASSERT_EQ(run_cli({"report", "--in", (a / "cases.csv").string(), "--out", out.string()}).code,
            cli::kOk);
  EXPECT_EQ(slurp(out), summary);
}

TEST(Cli, BenchValidation) {
  const auto root = scratch_dir("cli_bench_bad");
  const auto out = root / "never";
  auto args = bench_args(out, "dice,nope");
  EXPECT_EQ(run_cli(args).code, cli::kValidationError);
  args = bench_args(out, "dice");
  args.push_back("--lr");
  args.push_back("-1");
  EXPECT_EQ(run_cli(args).code, cli::kValidationError);
  args = bench_args(out, "dice");
  args[args.size() - 3] = "64,64,64";  // patch larger than the volume
  EXPECT_EQ(run_cli(args).code, cli::kValidationError);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, ReportErrors) {
  const auto root = scratch_dir("cli_report_bad");
  EXPECT_EQ(run_cli({"report", "--in", (root / "missing").string(), "--out",
                     (root / "s.csv").string()})
                .code,
            cli::kIoError);
  {
    std::ofstream f(root / "cases.csv");
    f << "not,a,header\n";
  }
  EXPECT_EQ(run_cli({"report", "--in", root.string(), "--out", (root / "s.csv").string()}).code,
            cli::kIoError);
  EXPECT_FALSE(fs::exists(root / "s.csv"));
}

}  // namespace
}  // namespace segloss
