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

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "segloss/metrics.hpp"
#include "segloss/synth.hpp"

namespace {

using namespace segloss;

BinaryMask random_mask(std::size_t side, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution fg(density);
  std::vector<std::uint8_t> v(side * side * side);
  for (auto& x : v) x = fg(rng);
  return BinaryMask({side, side, side}, {0.5, 0.75, 0.75}, std::move(v));
}

void BM_Hausdorff(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto a = surface_extract(random_mask(side, 0.05, 1));
  const auto b = surface_extract(random_mask(side, 0.05, 2));
  for (auto _ : state) benchmark::DoNotOptimize(hausdorff(a, b));
  state.counters["points"] = static_cast<double>(a.points.size() + b.points.size());
}
BENCHMARK(BM_Hausdorff)->Arg(12)->Arg(32)->Arg(48)->Unit(benchmark::kMicrosecond);

void BM_ConnectedComponents(benchmark::State& state) {
  const auto m = random_mask(static_cast<std::size_t>(state.range(0)), 0.3, 3);
  for (auto _ : state) benchmark::DoNotOptimize(connected_components(m).count);
}
BENCHMARK(BM_ConnectedComponents)->Arg(16)->Arg(48)->Unit(benchmark::kMicrosecond);

void BM_FullReport(benchmark::State& state) {
  const auto c = gen_phantom(PhantomConfig{}, 4);
  const auto pred = random_mask(48, 0.01, 5);
  const BinaryMask gt = c.new_lesion_mask;
  const BinaryMask p(gt.geometry(), {pred.data().begin(), pred.data().end()});
  for (auto _ : state) benchmark::DoNotOptimize(full_report(gt, p).dc);
}
BENCHMARK(BM_FullReport)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
