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

#include "jjl/lattice.hpp"

namespace {

void BM_BuildHamiltonian(benchmark::State& state) {
  jjl::LadderSpec spec;
  auto basis = jjl::ChargeBasis::build(spec.n_sites(), spec.n_max, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(jjl::build_hamiltonian(spec, basis));
  }
}
BENCHMARK(BM_BuildHamiltonian);

void BM_GroundDoublet(benchmark::State& state) {
  jjl::LadderSpec spec;
  auto basis = jjl::ChargeBasis::build(spec.n_sites(), spec.n_max, 0);
  auto h = jjl::build_hamiltonian(spec, basis);
  for (auto _ : state) {
    benchmark::DoNotOptimize(jjl::ground_spectrum(h, 3, {7, 1e-8, 350}));
  }
}
BENCHMARK(BM_GroundDoublet);

void BM_KrylovStep(benchmark::State& state) {
  jjl::LadderSpec spec;
  auto basis = jjl::ChargeBasis::build(spec.n_sites(), spec.n_max, 0);
  auto h = jjl::build_hamiltonian(spec, basis);
  Eigen::VectorXcd v = Eigen::VectorXcd::Random(h.dim());
  v.normalize();
  for (auto _ : state) {
    benchmark::DoNotOptimize(jjl::expm_krylov(h, v, 0.1));
  }
}
BENCHMARK(BM_KrylovStep);

void BM_ClassicalMinimize(benchmark::State& state) {
  jjl::LadderSpec spec;
  spec.ec = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(jjl::classical_minimize(spec, {8, 3, 1e-10, 4000, 60}));
  }
}
BENCHMARK(BM_ClassicalMinimize);

}  // namespace
