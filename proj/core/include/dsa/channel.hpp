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

#pragma once

#include <string>
#include <vector>

#include "dsa/geometry.hpp"
#include "dsa/types.hpp"

namespace dsa {

enum class ReceiverKind { isotropic_effective_length, half_wave_dipole };

// Receive probes. Dipole receivers are z-oriented; the isotropic kind keeps
// the angle-independent effective length lambda/pi. receive_gain is a plain
// power gain applied on top of the receiver model.
struct TestPointSet {
  std::vector<Vec3> positions;
  double receive_gain = 1.0;
  ReceiverKind kind = ReceiverKind::isotropic_effective_length;

  int size() const { return static_cast<int>(positions.size()); }
  void validate() const;
};

// Open-circuit receive volts per ampere of port current, rows ordered as the
// test points.
struct Transimpedance {
  CMat h;  // T x N
  double f = 0.0;
};

// Point scatterers re-radiating isotropically with a complex reflection
// coefficient each; used by the pure-NLOS channel.
struct NlosSpec {
  std::vector<Vec3> positions;
  std::vector<Cplx> coefficients;

  void validate() const;
};

// Noise power consumed by the spectral-efficiency metrics (closed-form, no
// sampling).
struct NoiseModel {
  double sigma2 = 0.0;  // watts
};

NoiseModel awgn_power(double sigma2);

// Half-wave-dipole effective length (lambda/pi) cos((pi/2) cos t) / sin t
// for the angle t between the wire axis and the departure direction; zero
// along the axis.
double dipole_effective_length(double cos_angle, double lambda);

// Direct line-of-sight transimpedance
//   H[t][n] = j eta / (2 lambda r) l_n(theta) l_r(theta_r) e^{-j 2 pi r /
//   lambda} sqrt(G_r)
// with r the element-to-point distance. Every point must clear the array's
// bounding sphere by at least two wavelengths (radiative region); points
// inside the Fraunhofer distance 2 D^2 / lambda only get a warning.
Transimpedance los_transimpedance(const DsaGeometry& g, const TestPointSet& pts,
                                  double f);

// Two-hop channel through the point scatterers, no direct term:
//   H[t][n] = sum_s rho_s h(n -> s) h(s -> t)
// with each hop an los-style scalar and the scatterer acting as an isotropic
// re-radiator. The receive gain enters once, on the final hop.
Transimpedance nlos_transimpedance(const DsaGeometry& g,
                                   const TestPointSet& pts,
                                   const NlosSpec& spec, double f);

// T equally spaced points on the azimuthal circle of radius d in the z = 0
// plane, point t (1-based) at angle 2 pi t / T from the x axis.
std::vector<Vec3> ring_positions(double d, int T);

// Colinear points centered at center, spaced along the given axis.
std::vector<Vec3> ula_positions(const Vec3& center, int T, double spacing,
                                const Vec3& axis);

// Flat-table loaders sharing the geometry CSV conventions: header x,y,z for
// plain points, x,y,z,re,im for scatterers with reflection coefficients.
std::vector<Vec3> load_points_csv(const std::string& path);
NlosSpec load_nlos_csv(const std::string& path);

}  // namespace dsa
