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

#include <doctest.h>

#include <cmath>

#include "dsa/multiport.hpp"
#include "dsa/rng.hpp"

namespace {

constexpr double kR = 50.0;

dsa::CMat random_symmetric(int n, dsa::SplitMix64& rng, double diag_boost) {
  dsa::CMat z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const dsa::Cplx v(rng.uniform(-20.0, 20.0), rng.uniform(-20.0, 20.0));
      z(i, j) = v;
      z(j, i) = v;
    }
  // A dominant resistive diagonal keeps Re{Z} PSD-ish and the mesh solvable.
  for (int i = 0; i < n; ++i) z(i, i) += dsa::Cplx(diag_boost, 0.0);
  return z;
}

dsa::PartitionedImpedance random_network(int n, int n_active,
                                         dsa::SplitMix64& rng) {
  dsa::PartitionedImpedance z;
  z.z = random_symmetric(n, rng, 80.0);
  // Symmetrize the real part's spectrum away from zero.
  const dsa::RMat re = z.z.real();
  Eigen::SelfAdjointEigenSolver<dsa::RMat> es(re);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin < 1.0)
    z.z += dsa::CMat::Identity(n, n) * dsa::Cplx(1.0 - lmin, 0.0);
  z.n_active = n_active;
  z.f = 2.4e9;
  return z;
}

dsa::CVec random_loads(int n, dsa::SplitMix64& rng) {
  dsa::CVec z(n);
  for (int i = 0; i < n; ++i)
    z[i] = dsa::Cplx(rng.uniform(0.05, 2.0), rng.uniform(-300.0, 300.0));
  return z;
}

// Mesh-equation oracle: with every port terminated, the full network obeys
// (Z + diag(terminations)) i = [v_g ; 0].
dsa::CVec solve_mesh(const dsa::PartitionedImpedance& z, const dsa::CVec& z_s,
                     const dsa::CVec& term_active, const dsa::CVec& v_g) {
  const int n = z.n();
  dsa::CMat a = z.z;
  for (int m = 0; m < z.n_active; ++m) a(m, m) += term_active[m];
  for (int s = 0; s < z.n_scatterer(); ++s)
    a(z.n_active + s, z.n_active + s) += z_s[s];
  dsa::CVec rhs = dsa::CVec::Zero(n);
  rhs.head(z.n_active) = v_g;
  return a.lu().solve(rhs);
}

}  // namespace

TEST_CASE("simplified weights solve the loaded mesh equations") {
  dsa::SplitMix64 rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.next() % 7);
    const int na = 1 + static_cast<int>(rng.next() % (n - 1));
    const dsa::PartitionedImpedance z = random_network(n, na, rng);
    const dsa::CVec z_s = random_loads(z.n_scatterer(), rng);
    const dsa::CVec z_l = random_loads(z.n_active, rng);
    const dsa::EmWeights w = dsa::em_weights_simplified(z, z_s, z_l, kR);

    dsa::CVec v_g(z.n_active);
    for (int m = 0; m < z.n_active; ++m)
      v_g[m] = dsa::Cplx(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
    dsa::CVec term(z.n_active);
    for (int m = 0; m < z.n_active; ++m) term[m] = z_l[m] + kR;

    const dsa::CVec direct = solve_mesh(z, z_s, term, v_g);
    const dsa::CVec via_w = w.w * v_g;
    REQUIRE(via_w.size() == direct.size());
    CHECK((via_w - direct).norm() <= 1e-9 * direct.norm());
  }
}

TEST_CASE("perfect weights satisfy scatterer KVL and unit matching") {
  dsa::SplitMix64 rng(202);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + static_cast<int>(rng.next() % 6);
    const int na = 1 + static_cast<int>(rng.next() % 2);
    const dsa::PartitionedImpedance z = random_network(n, na, rng);
    const dsa::CVec z_s = random_loads(z.n_scatterer(), rng);
    const dsa::EmWeights w = dsa::em_weights_perfect(z, z_s, kR);

    dsa::CVec v_g(na);
    for (int m = 0; m < na; ++m)
      v_g[m] = dsa::Cplx(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
    const dsa::CVec i = w.w * v_g;

    // Scatterer meshes: Z_sa i_a + (Z_ss + Z_S) i_s = 0.
    dsa::CVec residual =
        z.zsa() * i.head(na) + z.zss() * i.tail(z.n_scatterer());
    for (int s = 0; s < z.n_scatterer(); ++s)
      residual[s] += z_s[s] * i[na + s];
    CHECK(residual.norm() <= 1e-9 * i.norm());

    // Available power is fully accepted (eta_m = 1).
    const dsa::PowerReport pr =
        dsa::power_report(z, z_s, dsa::CVec(), w, v_g, kR);
    CHECK(pr.eta_m == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("input impedance folds the scatterers analytically") {
  dsa::PartitionedImpedance z;
  z.z = dsa::CMat(2, 2);
  z.z << dsa::Cplx(73.0, 42.0), dsa::Cplx(40.0, -28.0), dsa::Cplx(40.0, -28.0),
      dsa::Cplx(73.0, 42.0);
  z.n_active = 1;
  dsa::CVec z_s(1);
  z_s << dsa::Cplx(5.0, -100.0);
  const dsa::CMat za = dsa::input_impedance(z, z_s);
  const dsa::Cplx expected =
      z.z(0, 0) - z.z(0, 1) * z.z(1, 0) / (z.z(1, 1) + z_s[0]);
  CHECK(std::abs(za(0, 0) - expected) < 1e-12 * std::abs(expected));
}

TEST_CASE("singular scatterer mesh raises a network error") {
  dsa::PartitionedImpedance z;
  z.z = dsa::CMat(2, 2);
  z.z << dsa::Cplx(73.0, 42.0), dsa::Cplx(40.0, -28.0), dsa::Cplx(40.0, -28.0),
      dsa::Cplx(73.0, 42.0);
  z.n_active = 1;
  dsa::CVec z_s(1);
  z_s << -z.z(1, 1);
  CHECK_THROWS_AS(dsa::input_impedance(z, z_s), dsa::NetworkError);
}

TEST_CASE("symmetric square roots invert each other and guard passivity") {
  dsa::SplitMix64 rng(303);
  dsa::RMat m(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  m = (m * m.transpose()).eval();
  m += 5.0 * dsa::RMat::Identity(5, 5);
  const dsa::RMat s = dsa::symmetric_sqrt(m);
  CHECK((s * s - m).norm() <= 1e-10 * m.norm());
  const dsa::RMat si = dsa::symmetric_inverse_sqrt(m);
  CHECK((s * si - dsa::RMat::Identity(5, 5)).norm() < 1e-10);

  dsa::RMat indefinite = m;
  indefinite -= 20.0 * dsa::RMat::Identity(5, 5);
  CHECK_THROWS_AS(dsa::symmetric_sqrt(indefinite), dsa::PassivityError);
}

TEST_CASE("near-null radiation modes are floored instead of fatal") {
  dsa::RMat m(2, 2);
  m << 1.0, 0.0, 0.0, 1e-17;
  const dsa::RMat si = dsa::symmetric_inverse_sqrt(m);
  CHECK(std::isfinite(si(1, 1)));
  CHECK(si(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("power report books energy consistently") {
  dsa::SplitMix64 rng(404);
  const dsa::PartitionedImpedance z = random_network(5, 2, rng);
  const dsa::CVec z_s = random_loads(3, rng);
  const dsa::CVec z_l = random_loads(2, rng);
  const dsa::EmWeights w = dsa::em_weights_simplified(z, z_s, z_l, kR);
  dsa::CVec v_g(2);
  v_g << dsa::Cplx(1.0, 0.3), dsa::Cplx(-0.4, 0.8);
  const dsa::PowerReport pr = dsa::power_report(z, z_s, z_l, w, v_g, kR);

  CHECK(pr.p_tx == doctest::Approx(v_g.squaredNorm() / (4.0 * kR)));
  CHECK(pr.p_a == doctest::Approx(pr.p_rad + pr.p_d).epsilon(1e-9));
  CHECK(pr.eta_m == doctest::Approx(pr.p_a / pr.p_tx).epsilon(1e-12));
  CHECK(pr.eta_d == doctest::Approx(pr.p_rad / pr.p_a).epsilon(1e-12));
  CHECK(pr.q == doctest::Approx(std::abs(pr.p_react) / pr.p_rad).epsilon(1e-12));
  CHECK(pr.p_rad > 0.0);
  CHECK(pr.eta_m <= 1.0 + 1e-9);
}

namespace {

// Impedance with the layered-network zero pattern: active block R I,
// diagonal self-impedance entries inside each layer, dense inter-layer
// blocks B_l below the diagonal, zero elsewhere (including the whole upper
// triangle).
dsa::PartitionedImpedance bidiagonal_network(const std::vector<int>& sizes,
                                             dsa::SplitMix64& rng) {
  int n_s = 0;
  for (int s : sizes) n_s += s;
  const int n = 1 + n_s;
  dsa::PartitionedImpedance z;
  z.z = dsa::CMat::Zero(n, n);
  z.n_active = 1;
  z.f = 2.4e9;
  z.z(0, 0) = kR;
  int row = 1;
  int prev_start = 0, prev_size = 1;
  for (std::size_t l = 0; l < sizes.size(); ++l) {
    const int sz = sizes[l];
    for (int i = 0; i < sz; ++i)
      z.z(row + i, row + i) =
          dsa::Cplx(rng.uniform(40.0, 90.0), rng.uniform(-40.0, 40.0));
    for (int i = 0; i < sz; ++i)
      for (int j = 0; j < prev_size; ++j)
        z.z(row + i, prev_start + j) =
            dsa::Cplx(rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0));
    prev_start = row;
    prev_size = sz;
    row += sz;
  }
  return z;
}

}  // namespace

TEST_CASE("layered chain equals the general path on the same network") {
  dsa::SplitMix64 rng(505);
  for (int L = 1; L <= 7; ++L) {
    std::vector<int> sizes;
    for (int l = 0; l < L; ++l)
      sizes.push_back(1 + static_cast<int>(rng.next() % 12));
    dsa::SimImpedance sim;
    sim.part = bidiagonal_network(sizes, rng);
    sim.layer_sizes = sizes;

    const dsa::CVec z_s = random_loads(sim.part.n_scatterer(), rng);
    const dsa::CMat chain = dsa::sim_em_weights(sim, z_s, kR);

    const dsa::CVec z_l = dsa::CVec::Zero(1);
    const dsa::EmWeights general =
        dsa::em_weights_simplified(sim.part, z_s, z_l, kR);
    const dsa::CMat last = general.w.bottomRows(sizes.back());
    CHECK((chain - last).norm() <= 1e-10 * last.norm());
  }
}

TEST_CASE("layered chain names the first singular layer") {
  dsa::SplitMix64 rng(606);
  dsa::SimImpedance sim;
  sim.part = bidiagonal_network({2, 1}, rng);
  sim.layer_sizes = {2, 1};
  dsa::CVec z_s = random_loads(3, rng);
  z_s[2] = -sim.part.z(3, 3);  // layer 2 is the single port at index 3
  CHECK_THROWS_WITH_AS(dsa::sim_em_weights(sim, z_s, kR),
                       doctest::Contains("layer 2"), dsa::NetworkError);
}
