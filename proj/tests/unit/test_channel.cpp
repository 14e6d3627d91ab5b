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
#include <cstdio>
#include <fstream>

#include "dsa/channel.hpp"
#include "dsa/coupling.hpp"

namespace {

constexpr double kF0 = 2.4e9;

dsa::DsaGeometry single_dipole() {
  const double lam = dsa::wavelength(kF0);
  dsa::DipoleElement e;
  e.kind = dsa::ElementKind::active;
  e.length = lam / 2.0;
  e.wire_radius = lam / 1000.0;
  dsa::DsaGeometry g;
  g.elements.push_back(e);
  return g;
}

dsa::TestPointSet one_point(const dsa::Vec3& p, dsa::ReceiverKind kind) {
  dsa::TestPointSet pts;
  pts.positions = {p};
  pts.kind = kind;
  return pts;
}

// Reference single hop, written out independently of the library internals.
dsa::Cplx scalar_hop(const dsa::Vec3& a, const dsa::Vec3* a_axis,
                     const dsa::Vec3& b, const dsa::Vec3* b_axis, double lam) {
  const dsa::Vec3 d = b - a;
  const double r = d.norm();
  const double iso = lam / dsa::kPi;
  const double lt =
      a_axis ? dsa::dipole_effective_length(a_axis->dot(d) / r, lam) : iso;
  const double lr =
      b_axis ? dsa::dipole_effective_length(b_axis->dot(d) / r, lam) : iso;
  const double mag = dsa::kFreeSpaceImpedance / (2.0 * lam * r) * lt * lr;
  return dsa::Cplx(0.0, mag) *
         std::exp(dsa::Cplx(0.0, -2.0 * dsa::kPi * r / lam));
}

}  // namespace

TEST_CASE("effective length peaks broadside and vanishes axially") {
  const double lam = dsa::wavelength(kF0);
  CHECK(dsa::dipole_effective_length(0.0, lam) ==
        doctest::Approx(lam / dsa::kPi).epsilon(1e-12));
  CHECK(dsa::dipole_effective_length(1.0, lam) == 0.0);
  CHECK(dsa::dipole_effective_length(-1.0, lam) == 0.0);
  CHECK(dsa::dipole_effective_length(0.5, lam) <
        dsa::dipole_effective_length(0.0, lam));
}

TEST_CASE("broadside los entry matches the scalar formula") {
  const double lam = dsa::wavelength(kF0);
  const double d = 100.0;
  const dsa::DsaGeometry g = single_dipole();

  const dsa::Transimpedance h_iso = dsa::los_transimpedance(
      g,
      one_point(dsa::Vec3(d, 0.0, 0.0),
                dsa::ReceiverKind::isotropic_effective_length),
      kF0);
  const double mag = dsa::kFreeSpaceImpedance / (2.0 * lam * d) *
                     (lam / dsa::kPi) * (lam / dsa::kPi);
  const dsa::Cplx expected =
      dsa::Cplx(0.0, mag) * std::exp(dsa::Cplx(0.0, -2.0 * dsa::kPi * d / lam));
  CHECK(std::abs(h_iso.h(0, 0) - expected) < 1e-12 * std::abs(expected));

  // A z-oriented half-wave receiver in the equatorial plane has the same
  // effective length as the isotropic convention, so the entries agree.
  const dsa::Transimpedance h_dip = dsa::los_transimpedance(
      g, one_point(dsa::Vec3(d, 0.0, 0.0), dsa::ReceiverKind::half_wave_dipole),
      kF0);
  CHECK(std::abs(h_dip.h(0, 0) - expected) < 1e-12 * std::abs(expected));
}

TEST_CASE("off-broadside entries follow the pattern of both ends") {
  const double lam = dsa::wavelength(kF0);
  const dsa::DsaGeometry g = single_dipole();
  const dsa::Vec3 p(30.0, 0.0, 20.0);
  const dsa::Transimpedance h = dsa::los_transimpedance(
      g, one_point(p, dsa::ReceiverKind::half_wave_dipole), kF0);
  const dsa::Vec3 z = dsa::Vec3::UnitZ();
  const dsa::Cplx expected = scalar_hop(dsa::Vec3::Zero(), &z, p, &z, lam);
  CHECK(std::abs(h.h(0, 0) - expected) < 1e-12 * std::abs(expected));
}

TEST_CASE("receive gain scales amplitude by its square root") {
  const dsa::DsaGeometry g = single_dipole();
  dsa::TestPointSet pts =
      one_point(dsa::Vec3(50.0, 0.0, 0.0), dsa::ReceiverKind::half_wave_dipole);
  const dsa::Cplx base = dsa::los_transimpedance(g, pts, kF0).h(0, 0);
  pts.receive_gain = 4.0;
  const dsa::Cplx boosted = dsa::los_transimpedance(g, pts, kF0).h(0, 0);
  CHECK(std::abs(boosted - 2.0 * base) < 1e-12 * std::abs(base));
}

TEST_CASE("link budget is consistent with the friis equation") {
  // Two half-wave dipoles broadside at distance d. With P_tx = |i|^2 R_rad
  // and P_rx the power delivered to a conjugate-matched receive load, the
  // ratio must equal G^2 (lambda / 4 pi d)^2 with G = eta / (pi R_rad).
  const double lam = dsa::wavelength(kF0);
  const double d = 200.0;
  const dsa::DsaGeometry g = single_dipole();
  const dsa::Cplx z_self = dsa::dipole_self_impedance(g.elements[0], kF0);
  const double r_rad = z_self.real();

  const dsa::Transimpedance h = dsa::los_transimpedance(
      g, one_point(dsa::Vec3(d, 0.0, 0.0), dsa::ReceiverKind::half_wave_dipole),
      kF0);
  const dsa::Cplx i(0.8, -0.2);
  const double p_tx = std::norm(i) * r_rad;
  const double p_rx = std::norm(h.h(0, 0) * i) / (4.0 * r_rad);

  const double gain = dsa::kFreeSpaceImpedance / (dsa::kPi * r_rad);
  const double friis = gain * gain * std::pow(lam / (4.0 * dsa::kPi * d), 2.0);
  CHECK(p_rx / p_tx == doctest::Approx(friis).epsilon(1e-10));
  CHECK(gain == doctest::Approx(1.6409).epsilon(1e-3));
}

TEST_CASE("points violating the radiative clearance are rejected") {
  const dsa::DsaGeometry g = single_dipole();
  CHECK_THROWS_AS(
      dsa::los_transimpedance(
          g,
          one_point(dsa::Vec3(dsa::wavelength(kF0), 0.0, 0.0),
                    dsa::ReceiverKind::half_wave_dipole),
          kF0),
      dsa::GeometryError);
  dsa::TestPointSet empty;
  CHECK_THROWS_AS(dsa::los_transimpedance(g, empty, kF0), dsa::GeometryError);
  CHECK_THROWS_AS(
      dsa::los_transimpedance(
          g, one_point(dsa::Vec3(10.0, 0.0, 0.0),
                       dsa::ReceiverKind::half_wave_dipole),
          -1.0),
      dsa::ConfigError);
}

TEST_CASE("single-bounce channel is the product of two hops") {
  const double lam = dsa::wavelength(kF0);
  const dsa::DsaGeometry g = single_dipole();
  const dsa::Vec3 sp(5.0, 2.0, 1.0);
  const dsa::Vec3 rx(40.0, -3.0, 0.0);
  const dsa::Cplx rho(0.01, -0.02);

  dsa::NlosSpec spec;
  spec.positions = {sp};
  spec.coefficients = {rho};
  const dsa::Transimpedance h = dsa::nlos_transimpedance(
      g, one_point(rx, dsa::ReceiverKind::half_wave_dipole), spec, kF0);

  const dsa::Vec3 z = dsa::Vec3::UnitZ();
  const dsa::Cplx expected = rho * scalar_hop(dsa::Vec3::Zero(), &z, sp,
                                              nullptr, lam) *
                             scalar_hop(sp, nullptr, rx, &z, lam);
  CHECK(std::abs(h.h(0, 0) - expected) < 1e-12 * std::abs(expected));
}

TEST_CASE("multi-scatterer channel superposes single bounces") {
  const dsa::DsaGeometry g = single_dipole();
  const dsa::TestPointSet pts =
      one_point(dsa::Vec3(40.0, -3.0, 0.0), dsa::ReceiverKind::half_wave_dipole);

  dsa::NlosSpec both;
  both.positions = {dsa::Vec3(5.0, 2.0, 1.0), dsa::Vec3(-4.0, 7.0, -2.0)};
  both.coefficients = {dsa::Cplx(0.01, -0.02), dsa::Cplx(-0.03, 0.005)};

  dsa::CMat sum = dsa::CMat::Zero(1, 1);
  for (std::size_t s = 0; s < both.positions.size(); ++s) {
    dsa::NlosSpec one;
    one.positions = {both.positions[s]};
    one.coefficients = {both.coefficients[s]};
    sum += dsa::nlos_transimpedance(g, pts, one, kF0).h;
  }
  const dsa::CMat h = dsa::nlos_transimpedance(g, pts, both, kF0).h;
  CHECK(std::abs(h(0, 0) - sum(0, 0)) < 1e-12 * std::abs(sum(0, 0)));

  dsa::NlosSpec bad;
  bad.positions = both.positions;
  bad.coefficients = {dsa::Cplx(0.01, 0.0)};
  CHECK_THROWS_AS(dsa::nlos_transimpedance(g, pts, bad, kF0),
                  dsa::GeometryError);
}

TEST_CASE("ring points are one-based with point T closing the circle") {
  const auto pts = dsa::ring_positions(100.0, 120);
  REQUIRE(pts.size() == 120);
  CHECK(pts[59].x() == doctest::Approx(-100.0).epsilon(1e-12));
  CHECK(std::abs(pts[59].y()) < 1e-9);
  CHECK(pts[119].x() == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(std::abs(pts[119].y()) < 1e-9);
  // The first point is a full step past the x axis, not on it.
  CHECK(pts[0].x() == doctest::Approx(100.0 * std::cos(2.0 * dsa::kPi / 120)));
  CHECK(pts[0].y() == doctest::Approx(100.0 * std::sin(2.0 * dsa::kPi / 120)));
  for (const auto& p : pts) {
    CHECK(p.norm() == doctest::Approx(100.0));
    CHECK(p.z() == 0.0);
  }
  CHECK_THROWS_AS(dsa::ring_positions(0.0, 8), dsa::GeometryError);
  CHECK_THROWS_AS(dsa::ring_positions(10.0, 0), dsa::GeometryError);
}

TEST_CASE("ula points are centered along the axis") {
  const dsa::Vec3 center(10.0, 0.0, 0.0);
  const auto pts = dsa::ula_positions(center, 20, 0.0625, dsa::Vec3::UnitY());
  REQUIRE(pts.size() == 20);
  dsa::Vec3 mean = dsa::Vec3::Zero();
  for (const auto& p : pts) mean += p;
  mean /= 20.0;
  CHECK((mean - center).norm() < 1e-12);
  CHECK((pts[1] - pts[0] - 0.0625 * dsa::Vec3::UnitY()).norm() < 1e-12);
  CHECK((pts.back() - pts.front()).norm() == doctest::Approx(19 * 0.0625));

  const auto odd = dsa::ula_positions(center, 7, 0.1, dsa::Vec3(0.0, 2.0, 0.0));
  CHECK((odd[3] - center).norm() < 1e-12);
  CHECK_THROWS_AS(dsa::ula_positions(center, 3, 0.1, dsa::Vec3::Zero()),
                  dsa::GeometryError);
}

TEST_CASE("point csv loaders round trip") {
  const std::string path = "points_roundtrip_test.csv";
  {
    std::ofstream out(path);
    out << "x,y,z\n1.5,2.5,3.5\n-1,0,4\n";
  }
  const auto pts = dsa::load_points_csv(path);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0] == dsa::Vec3(1.5, 2.5, 3.5));
  CHECK(pts[1] == dsa::Vec3(-1.0, 0.0, 4.0));
  {
    std::ofstream out(path);
    out << "a,b,c\n1,2,3\n";
  }
  CHECK_THROWS_AS(dsa::load_points_csv(path), dsa::IoError);

  {
    std::ofstream out(path);
    out << "x,y,z,re,im\n9,8,7,0.25,-0.5\n";
  }
  const auto spec = dsa::load_nlos_csv(path);
  std::remove(path.c_str());
  REQUIRE(spec.positions.size() == 1);
  CHECK(spec.positions[0] == dsa::Vec3(9.0, 8.0, 7.0));
  CHECK(spec.coefficients[0] == dsa::Cplx(0.25, -0.5));
  CHECK_THROWS_AS(dsa::load_points_csv("no_such_points_file.csv"),
                  dsa::IoError);
}
