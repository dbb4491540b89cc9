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

#include "segloss/losses.hpp"
#include "segloss/synth.hpp"
#include "segloss/trainer.hpp"

namespace {

using namespace segloss;

struct Inputs {
  std::vector<std::uint8_t> y;
  std::vector<double> p;
};

Inputs make_inputs(std::size_t n) {
  std::mt19937_64 rng(1);
  std::bernoulli_distribution fg(0.1);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  Inputs in{std::vector<std::uint8_t>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    in.y[i] = fg(rng);
    in.p[i] = u(rng);
  }
  return in;
}

// Forward + gradient for one kind on a cubic patch of side range(1).
void BM_LossEval(benchmark::State& state) {
  const auto kind = kAllLossKinds[static_cast<std::size_t>(state.range(0))];
  const auto side = static_cast<std::size_t>(state.range(1));
  const auto in = make_inputs(side * side * side);
  const auto spec = LossSpec::defaults(kind);
  for (auto _ : state) {
    auto r = loss_eval(spec, in.y, in.p);
    benchmark::DoNotOptimize(r.value);
  }
  state.SetLabel(std::string(kind_name(kind)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(in.p.size()));
}
BENCHMARK(BM_LossEval)
    ->ArgsProduct({benchmark::CreateDenseRange(0, static_cast<int>(kAllLossKinds.size()) - 1, 1),
                   {32}});

void BM_LossValueOnly(benchmark::State& state) {
  const auto in = make_inputs(32 * 32 * 32);
  const auto spec = LossSpec::defaults(LossKind::HyTver);
  for (auto _ : state) benchmark::DoNotOptimize(loss_value(spec, in.y, in.p));
}
BENCHMARK(BM_LossValueOnly);

void BM_Featurize(benchmark::State& state) {
  const auto c = gen_phantom(PhantomConfig{}, 3);
  for (auto _ : state) {
    auto f = featurize(c);
    benchmark::DoNotOptimize(f.values.data());
  }
}
BENCHMARK(BM_Featurize);

// One training iteration at the default batch and patch size.
void BM_TrainIteration(benchmark::State& state) {
  PhantomConfig pc;
  pc.noise_sigma = 0.0;
  std::vector<LongitudinalCase> cases{gen_phantom(pc, 1), gen_phantom(pc, 2)};
  TrainConfig cfg;
  cfg.iterations = 1;
  const auto spec = LossSpec::defaults(LossKind::HyTver);
  for (auto _ : state) {
    auto h = train_toy(cases, spec, cfg);
    benchmark::DoNotOptimize(h.model.weights.data());
  }
}
BENCHMARK(BM_TrainIteration)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
