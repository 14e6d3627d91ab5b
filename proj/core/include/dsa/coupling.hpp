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

#include "dsa/geometry.hpp"
#include "dsa/types.hpp"

namespace dsa {

// Induced-EMF self impedance of a thin-wire dipole with sinusoidal current.
// The resistance integrates the field kernel on the wire axis (where it is
// regular and reproduces the far-field radiation integral exactly, keeping
// assembled Re{Z} positive semidefinite); the reactance integrates at the
// wire surface, which is where the finite radius enters.
Cplx dipole_self_impedance(const DipoleElement& elem, double f);

// Induced-EMF mutual impedance of two parallel dipoles in side-by-side or
// echelon arrangement, by adaptive quadrature of the coupling integral.
// Symmetric in (a, b). Antiparallel orientations flip the sign. Throws
// GeometryError for non-parallel axes or overlapping wire segments.
Cplx dipole_mutual_impedance(const DipoleElement& a, const DipoleElement& b,
                             double f);

// The N x N impedance matrix of a geometry at frequency f with its canonical
// active/scatterer block views. Always symmetric (reciprocity holds bit-exact
// by construction).
struct PartitionedImpedance {
  CMat z;          // N x N
  int n_active = 0;
  double f = 0.0;  // hertz

  int n() const { return static_cast<int>(z.rows()); }
  int n_scatterer() const { return n() - n_active; }

  auto zaa() const { return z.topLeftCorner(n_active, n_active); }
  auto zas() const { return z.topRightCorner(n_active, n_scatterer()); }
  auto zsa() const { return z.bottomLeftCorner(n_scatterer(), n_active); }
  auto zss() const { return z.bottomRightCorner(n_scatterer(), n_scatterer()); }
};

// Pairwise assembly over the upper triangle: diagonal from
// dipole_self_impedance, off-diagonal from dipole_mutual_impedance.
PartitionedImpedance assemble_impedance_matrix(const DsaGeometry& g, double f);

}  // namespace dsa
