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

#include "dsa/types.hpp"

namespace dsa {

// Varactor equivalent circuit: L_1 in parallel with (L_2 -- C(theta) -- R_v)
// in series. The control parameter theta is an unconstrained real; the
// arctangent map below squashes it into the diode capacitance range.
struct VaractorParams {
  double r_v = 0.1;       // ohm
  double l_1 = 2.5e-9;    // henry
  double l_2 = 0.7e-9;    // henry
  double c_min = 0.47e-12;  // farad
  double c_max = 2.35e-12;  // farad
};

// Throws ConfigError unless all values are positive and c_max > c_min.
void validate(const VaractorParams& v);

// C = c_min + (c_max - c_min) * (atan(theta) + pi/2) / pi. Strictly
// increasing, range (c_min, c_max).
double capacitance_of(double theta, const VaractorParams& v);

// Input impedance of the loaded varactor network at frequency f:
//   z = jwL1 * (jwL2 + 1/(jwC) + R_v) / (jw(L1+L2) + 1/(jwC) + R_v).
// Rejects f <= 0. Re{z} >= 0 for all theta.
Cplx varactor_impedance(double f, double theta, const VaractorParams& v);

// Analytic derivative dz/dtheta at fixed f. Shares the exact circuit algebra
// with varactor_impedance; used by tests as an oracle for difference schemes.
Cplx varactor_impedance_derivative(double f, double theta,
                                   const VaractorParams& v);

// The reconfigurable parameter set psi = {theta; phi}: theta drives the
// scatterer loads, phi the per-active matching loads (empty under perfect
// matching).
struct LoadBank {
  RVec theta;
  RVec phi;
  VaractorParams varactor;
};

// Per-element load impedances at frequency f: Z_S diagonal entries for the
// scatterers and Z_L diagonal entries for the actives (empty when phi is).
struct LoadMatrices {
  CVec scatterer;  // N_s
  CVec active;     // N_a or empty
};

LoadMatrices load_matrices(const LoadBank& bank, double f);

}  // namespace dsa
