// Copyright 2026 The JJL Workbench Authors
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

#include <benchmark/benchmark.h>

#include "jjl/characters.hpp"
#include "jjl/flux.hpp"

namespace {

void BM_JacobiTheta3(benchmark::State& state) {
  jjl::TorusModulus tau{{0.3, 1.1}};
  std::complex<double> z{0.17, 0.05};
  for (auto _ : state) {
    benchmark::DoNotOptimize(jjl::jacobi_theta(3, z, tau));
  }
}
BENCHMARK(BM_JacobiTheta3);

void BM_JacobiTheta3Extended(benchmark::State& state) {
  jjl::TorusModulus tau{{0.3, 1.1}};
  jjl::SeriesControl ctrl;
  ctrl.precision = jjl::Precision::kExtended;
  ctrl.tail_tolerance = 1e-28;
  std::complex<double> z{0.17, 0.05};
  for (auto _ : state) {
    benchmark::DoNotOptimize(jjl::jacobi_theta(3, z, tau, ctrl));
  }
}
BENCHMARK(BM_JacobiTheta3Extended);

void BM_DedekindEta(benchmark::State& state) {
  jjl::TorusModulus tau{{0.3, 1.1}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(jjl::dedekind_eta(tau));
  }
}
BENCHMARK(BM_DedekindEta);

void BM_TmCharacter(benchmark::State& state) {
  jjl::TorusModulus tau{{0.0, 1.0}};
  std::complex<double> wc{0.37, 0.21};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        jjl::tm_character({jjl::Sector::kAP, 0}, {0.0, 0.0}, wc, tau));
  }
}
BENCHMARK(BM_TmCharacter);

void BM_FluxInsertFull(benchmark::State& state) {
  jjl::TorusModulus tau{{0.0, 1.0}};
  auto samples = jjl::default_wc_samples(tau, 8, 42);
  for (auto _ : state) {
    benchmark::DoNotOptimize(jjl::flux_insert_full({jjl::Sector::kAP, 0}, tau, samples));
  }
}
BENCHMARK(BM_FluxInsertFull);

}  // namespace

BENCHMARK_MAIN();
