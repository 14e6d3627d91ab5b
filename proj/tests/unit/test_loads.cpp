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

#include "dsa/loads.hpp"

namespace {
const dsa::VaractorParams kVp;
constexpr double kF0 = 2.4e9;
}  // namespace

TEST_CASE("capacitance map is monotone with the documented range") {
  CHECK(dsa::capacitance_of(0.0, kVp) == doctest::Approx(1.41e-12).epsilon(1e-12));
  CHECK(dsa::capacitance_of(-1e9, kVp) ==
        doctest::Approx(kVp.c_min).epsilon(1e-6));
  CHECK(dsa::capacitance_of(1e9, kVp) ==
        doctest::Approx(kVp.c_max).epsilon(1e-6));
  double prev = dsa::capacitance_of(-10.0, kVp);
  for (double t = -9.5; t <= 10.0; t += 0.5) {
    const double c = dsa::capacitance_of(t, kVp);
    CHECK(c > prev);
    prev = c;
  }
}

TEST_CASE("varactor impedance pins its frozen values") {
  const dsa::Cplx z0 = dsa::varactor_impedance(kF0, 0.0, kVp);
  CHECK(z0.real() == doctest::Approx(94.34776063196232).epsilon(1e-12));
  CHECK(z0.imag() == doctest::Approx(-1116.419862092875).epsilon(1e-12));

  const dsa::Cplx zm1 = dsa::varactor_impedance(kF0, -1.0, kVp);
  CHECK(zm1.real() == doctest::Approx(0.2859791442853939).epsilon(1e-12));
  CHECK(zm1.imag() == doctest::Approx(101.45112895825464).epsilon(1e-12));
}

TEST_CASE("varactor passes through a series resonance") {
  double lo = -1.0, hi = 0.0;
  CHECK(dsa::varactor_impedance(kF0, lo, kVp).imag() > 0.0);
  CHECK(dsa::varactor_impedance(kF0, hi, kVp).imag() < 0.0);
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (dsa::varactor_impedance(kF0, mid, kVp).imag() > 0.0 ? lo : hi) = mid;
  }
  const dsa::Cplx zr = dsa::varactor_impedance(kF0, 0.5 * (lo + hi), kVp);
  CHECK(std::abs(zr.imag()) < 1e-6);
  CHECK(zr.real() > 0.0);
}

TEST_CASE("resistive part stays passive across the control range") {
  for (double t = -50.0; t <= 50.0; t += 0.25)
    CHECK(dsa::varactor_impedance(kF0, t, kVp).real() >= 0.0);
  for (double f = 0.5e9; f <= 6.0e9; f += 0.25e9)
    CHECK(dsa::varactor_impedance(f, 0.3, kVp).real() >= 0.0);
}

TEST_CASE("analytic derivative matches a central difference") {
  const double h = 1e-6;
  for (double t : {-2.0, -0.5, -0.06, 0.0, 0.3, 1.7}) {
    const dsa::Cplx d = dsa::varactor_impedance_derivative(kF0, t, kVp);
    const dsa::Cplx fd = (dsa::varactor_impedance(kF0, t + h, kVp) -
                          dsa::varactor_impedance(kF0, t - h, kVp)) /
                         (2.0 * h);
    CHECK(std::abs(d - fd) <= 1e-6 * std::abs(d));
  }
}

TEST_CASE("load matrices mirror the bank layout") {
  dsa::LoadBank bank;
  bank.theta = dsa::RVec(3);
  bank.theta << -1.0, 0.0, 2.0;
  bank.phi = dsa::RVec(1);
  bank.phi << 0.5;
  bank.varactor = kVp;
  const dsa::LoadMatrices lm = dsa::load_matrices(bank, kF0);
  REQUIRE(lm.scatterer.size() == 3);
  REQUIRE(lm.active.size() == 1);
  CHECK(lm.scatterer[1] == dsa::varactor_impedance(kF0, 0.0, kVp));
  CHECK(lm.active[0] == dsa::varactor_impedance(kF0, 0.5, kVp));
}

TEST_CASE("invalid varactor parameters are rejected") {
  dsa::VaractorParams bad = kVp;
  bad.c_max = bad.c_min;
  CHECK_THROWS_AS(dsa::validate(bad), dsa::ConfigError);
  bad = kVp;
  bad.r_v = 0.0;
  CHECK_THROWS_AS(dsa::validate(bad), dsa::ConfigError);
  CHECK_THROWS_AS(dsa::varactor_impedance(0.0, 0.0, kVp), dsa::ConfigError);
}
