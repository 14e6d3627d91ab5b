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

#include "dsa/coupling.hpp"

#include <cmath>
#include <functional>
#include <iostream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace dsa {

namespace {

constexpr double kQuadTol = 1e-12;
constexpr int kQuadDepth = 15;

using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;

// Field kernel of a sinusoidal dipole of half-length ls whose feed sits at
// axial offset h and lateral distance d from the observation axis:
//   K(z) = e(R1)/R1 + e(R2)/R2 - 2 cos(k ls) e(r)/r
// with R1, R2 the tip distances and r the feed distance. The observer current
// weight is sin(k(lo - |z|)). The real (cosine) part carries the reactance,
// the imaginary (sine) part the resistance once multiplied by j.
struct EmfKernel {
  double k, ls, lo, d, h;

  double r1(double z) const { return std::hypot(d, z - h - ls); }
  double r2(double z) const { return std::hypot(d, z - h + ls); }
  double r0(double z) const { return std::hypot(d, z - h); }
  double weight(double z) const { return std::sin(k * (lo - std::abs(z))); }

  // sin(kR)/R is regular for R -> 0, so this integrand is valid on the axis.
  double sine_part(double z) const {
    auto sr = [this](double r) {
      return r < 1e-30 ? k : std::sin(k * r) / r;
    };
    return weight(z) *
           (sr(r1(z)) + sr(r2(z)) - 2.0 * std::cos(k * ls) * sr(r0(z)));
  }

  double cosine_part(double z) const {
    return weight(z) * (std::cos(k * r1(z)) / r1(z) + std::cos(k * r2(z)) / r2(z) -
                        2.0 * std::cos(k * ls) * std::cos(k * r0(z)) / r0(z));
  }
};

double integrate_halves(const std::function<double(double)>& f, double lo) {
  // Split at the current-weight kink z = 0.
  const double left = Quad::integrate(f, -lo, 0.0, kQuadDepth, kQuadTol);
  const double right = Quad::integrate(f, 0.0, lo, kQuadDepth, kQuadTol);
  return left + right;
}

// Z = j C / (sin(k ls) sin(k lo)) * Integral{ w(z) K(z) }, C = eta / (4 pi).
Cplx emf_impedance(double k, double ls, double lo, double d, double h,
                   double d_resistance) {
  const double c = kFreeSpaceImpedance / (4.0 * kPi);
  const double norm = std::sin(k * ls) * std::sin(k * lo);
  if (std::abs(norm) < 1e-9)
    throw GeometryError("resonant full-wave element length unsupported");
  EmfKernel kr{k, ls, lo, d_resistance, h};
  EmfKernel kx{k, ls, lo, d, h};
  const double sine = integrate_halves([&](double z) { return kr.sine_part(z); }, lo);
  const double cosine =
      integrate_halves([&](double z) { return kx.cosine_part(z); }, lo);
  // j * (cosine + j * (-sine))  with the e^{-jkR} sign convention.
  return Cplx(sine, cosine) * (c / norm);
}

void check_regime(const DipoleElement& e, double lam) {
  const double ratio = e.length / lam;
  if (ratio < 0.4 || ratio > 0.6) {
    static bool warned = false;
    if (!warned) {
      std::cerr << "warning: element length " << ratio
                << " wavelengths is outside the validated half-wave regime\n";
      warned = true;
    }
  }
}

}  // namespace

Cplx dipole_self_impedance(const DipoleElement& elem, double f) {
  if (!(f > 0.0)) throw ConfigError("self impedance requires f > 0");
  const double lam = wavelength(f);
  check_regime(elem, lam);
  const double k = wavenumber(f);
  const double l = 0.5 * elem.length;
  return emf_impedance(k, l, l, elem.wire_radius, 0.0, 0.0);
}

Cplx dipole_mutual_impedance(const DipoleElement& a, const DipoleElement& b,
                             double f) {
  if (!(f > 0.0)) throw ConfigError("mutual impedance requires f > 0");
  const Vec3 axis = a.orientation;
  if (axis.cross(b.orientation).norm() > 1e-9)
    throw GeometryError("non-parallel dipole orientations are unsupported");
  const double sign = axis.dot(b.orientation) >= 0.0 ? 1.0 : -1.0;

  const Vec3 dv = b.position - a.position;
  const double h = dv.dot(axis);
  const double d = (dv - h * axis).norm();
  const double la = 0.5 * a.length;
  const double lb = 0.5 * b.length;

  // Wires on (nearly) the same axis must keep an axial gap.
  if (d <= a.wire_radius + b.wire_radius && std::abs(h) <= la + lb)
    throw GeometryError("dipole wire segments overlap");

  const double k = wavenumber(f);
  // Source is element a (half-length la), observation runs over element b.
  const Cplx z = emf_impedance(k, la, lb, d, h, d);
  return sign * z;
}

PartitionedImpedance assemble_impedance_matrix(const DsaGeometry& g, double f) {
  validate(g);
  const int n = g.n();
  PartitionedImpedance out;
  out.n_active = g.n_active();
  out.f = f;
  out.z.resize(n, n);
  for (int m = 0; m < n; ++m) {
    out.z(m, m) = dipole_self_impedance(g.elements[static_cast<std::size_t>(m)], f);
    for (int q = m + 1; q < n; ++q) {
      const Cplx z = dipole_mutual_impedance(
          g.elements[static_cast<std::size_t>(m)],
          g.elements[static_cast<std::size_t>(q)], f);
      out.z(m, q) = z;
      out.z(q, m) = z;
    }
  }
  return out;
}

}  // namespace dsa
