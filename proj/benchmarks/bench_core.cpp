// SPDX-License-Identifier: Apache-2.0
//
// dsa-sim: dynamic scattering array simulator and optimizer
// Copyright (C) 2026 the dsa-sim contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <benchmark/benchmark.h>

#include "dsa/coupling.hpp"
#include "dsa/geometry.hpp"
#include "dsa/multiport.hpp"
#include "dsa/optimizer.hpp"
#include "dsa/rng.hpp"

namespace {

constexpr double kF0 = 2.4e9;

dsa::DsaGeometry disk(int rings) {
  dsa::RingDiskSpec spec;
  spec.ring_step = dsa::wavelength(kF0) / 4.0;
  spec.rings = rings;
  spec.frequency = kF0;
  return dsa::make_disk_geometry(spec);
}

dsa::Scenario scenario(const dsa::DsaGeometry& g) {
  dsa::Scenario sc;
  sc.R = 50.0;
  sc.n_active = g.n_active();
  sc.n_scatterer = g.n_scatterer();
  sc.digital_precoder = false;
  dsa::SubcarrierProblem p;
  p.f = kF0;
  p.z = dsa::assemble_impedance_matrix(g, kF0);
  p.h_c = dsa::CMat::Zero(8, g.n());
  p.h_opt = dsa::CMat::Zero(8, g.n_active());
  for (int t = 0; t < 8; ++t)
    for (int n = 0; n < g.n(); ++n)
      p.h_c(t, n) = dsa::Cplx(0.01 * (t + 1), -0.02 * (n % 7));
  p.h_opt(3, 0) = 1.0;
  sc.subcarriers.push_back(std::move(p));
  return sc;
}

dsa::RVec random_psi(int dim, std::uint64_t seed) {
  dsa::SplitMix64 rng(seed);
  dsa::RVec psi(dim);
  for (int i = 0; i < dim; ++i) psi[i] = -5.0 + 10.0 * rng.uniform01();
  return psi;
}

void BM_AssembleImpedance(benchmark::State& state) {
  const dsa::DsaGeometry g = disk(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(dsa::assemble_impedance_matrix(g, kF0));
  state.counters["N"] = g.n();
}
BENCHMARK(BM_AssembleImpedance)->Arg(2)->Arg(3)->Arg(5);

void BM_SimplifiedWeights(benchmark::State& state) {
  const dsa::DsaGeometry g = disk(static_cast<int>(state.range(0)));
  const dsa::PartitionedImpedance z = dsa::assemble_impedance_matrix(g, kF0);
  const dsa::RVec psi = random_psi(g.n(), 7);
  dsa::CVec z_s(g.n_scatterer()), z_l(g.n_active());
  const dsa::VaractorParams vp;
  for (int n = 0; n < g.n_scatterer(); ++n)
    z_s[n] = dsa::varactor_impedance(kF0, psi[n], vp);
  for (int m = 0; m < g.n_active(); ++m)
    z_l[m] = dsa::varactor_impedance(kF0, psi[g.n_scatterer() + m], vp);
  for (auto _ : state)
    benchmark::DoNotOptimize(dsa::em_weights_simplified(z, z_s, z_l, 50.0));
  state.counters["N"] = g.n();
}
BENCHMARK(BM_SimplifiedWeights)->Arg(3)->Arg(5);

void BM_ObjectiveValue(benchmark::State& state) {
  const dsa::DsaGeometry g = disk(static_cast<int>(state.range(0)));
  const dsa::Scenario sc = scenario(g);
  dsa::ObjectiveEvaluator eval(sc, {1.0},
                               {dsa::CMat::Identity(1, 1) * 2.0 *
                                std::sqrt(50.0)});
  const dsa::RVec psi = random_psi(sc.psi_dim(), 11);
  for (auto _ : state) benchmark::DoNotOptimize(eval.value(psi));
  state.counters["psi_dim"] = sc.psi_dim();
}
BENCHMARK(BM_ObjectiveValue)->Arg(3)->Arg(5);

void BM_ObjectiveGradient(benchmark::State& state) {
  const dsa::DsaGeometry g = disk(static_cast<int>(state.range(0)));
  const dsa::Scenario sc = scenario(g);
  dsa::ObjectiveEvaluator eval(sc, {1.0},
                               {dsa::CMat::Identity(1, 1) * 2.0 *
                                std::sqrt(50.0)});
  const dsa::RVec psi = random_psi(sc.psi_dim(), 11);
  const double base = eval.value_cached(psi);
  for (auto _ : state)
    benchmark::DoNotOptimize(eval.gradient(psi, base, 1e-6));
  state.counters["psi_dim"] = sc.psi_dim();
}
BENCHMARK(BM_ObjectiveGradient)->Arg(3)->Arg(5);

}  // namespace

BENCHMARK_MAIN();
