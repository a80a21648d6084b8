// Copyright 2026 The diffauction Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial reference against the OpenMP kernels on the same inputs.

#include <benchmark/benchmark.h>

#include "diffauction/experiments.hpp"
#include "diffauction/verification.hpp"

namespace {

using namespace diffauction;

Execution mode_of(const benchmark::State& state) {
  return state.range(0) ? Execution::kParallel : Execution::kSerial;
}

void BM_MonteCarlo(benchmark::State& state) {
  const auto m = make_mechanism("cwm-srp:sigma2");
  const auto s = generate_small_world(100, 2, 0.5, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        monte_carlo_revenue(*m, s, Priors::uniform(), 200000, 1, mode_of(state)).mean);
  }
  state.SetItemsProcessed(state.iterations() * 200000);
}
BENCHMARK(BM_MonteCarlo)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Quadrature(benchmark::State& state) {
  const auto m = make_mechanism("cwm");
  const auto s = chain_structure(4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        exact_revenue_small(*m, s, Priors::uniform(), {32, 0, mode_of(state)}).value);
  }
}
BENCHMARK(BM_Quadrature)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_IncentiveCheck(benchmark::State& state) {
  const auto m = make_mechanism("cwm");
  const auto s = generate_random_structure(5, 0.3, 2);
  const auto grid = DeviationGrid::evenly_spaced(UniformDistribution(0, 1), 11);
  CheckOptions opts;
  opts.parallel = state.range(0) != 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_ic(*m, s, Priors::uniform(), grid, opts).size());
  }
}
BENCHMARK(BM_IncentiveCheck)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CwmFastChain(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto s = chain_structure(n);
  Rng rng(5);
  std::vector<double> v(n);
  for (auto& x : v) x = uniform01(rng);
  const auto report = ReportProfile::truthful(s, v);
  const Priors priors = Priors::uniform();
  for (auto _ : state) benchmark::DoNotOptimize(cwm_fast(report, priors).price);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CwmFastChain)->RangeMultiplier(10)->Range(1000, 100000)->Complexity();

}  // namespace

BENCHMARK_MAIN();
