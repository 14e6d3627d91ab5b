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

#include <vector>

#include "dsa/coupling.hpp"
#include "dsa/types.hpp"

namespace dsa {

enum class MatchingTag { perfect, simplified };

// Matching network between the RF chains and the active ports.
struct MatchingMode {
  MatchingTag tag = MatchingTag::perfect;
  double R = 50.0;  // RF-chain internal resistance, ohms

  void validate() const;
};

// Currents per unit open-circuit source voltage: i = W v_g with W stacked as
// [active rows; scatterer rows].
struct EmWeights {
  CMat w;  // N x N_a
  MatchingMode mode;
  double f = 0.0;  // hertz
};

// Power bookkeeping for one excitation. P_a = eta_m * P_tx is the power
// accepted by the structure, which splits into radiated and dissipated parts:
// P_rad = eta_d * P_a and P_rad + P_d = P_a.
struct PowerReport {
  double p_tx = 0.0;     // available source power, watts
  double p_a = 0.0;      // accepted power, watts
  double p_rad = 0.0;    // radiated power, watts
  double p_react = 0.0;  // reactive power (signed quadratic form), watts
  double p_d = 0.0;      // power dissipated in the loads, watts
  double eta_m = 0.0;    // matching efficiency, P_a / P_tx
  double eta_d = 0.0;    // radiation efficiency, P_rad / P_a
  double q = 0.0;        // |P_react| / P_rad
};

// Principal square root / inverse square root of a near-PSD symmetric matrix.
// Eigenvalues below 1e-12 * lambda_max are clamped to that floor (with a
// one-line warning on stderr); an eigenvalue below -1e-6 * lambda_max throws
// PassivityError. Superdirective load settings drive the radiation-resistance
// eigenvalues of Re{Z_A} toward zero, so the floor keeps the perfect-matching
// weights evaluable there.
RMat symmetric_sqrt(const RMat& m);
RMat symmetric_inverse_sqrt(const RMat& m);

// Input impedance seen at the active ports once the loaded scatterers are
// folded in: Z_A = Z_aa - Z_as (Z_ss + Z_S)^{-1} Z_sa. Z_S holds the
// per-scatterer load impedances. If cond_out is non-null it receives the
// condition estimate of (Z_ss + Z_S); an estimate above 1e12 throws
// NetworkError.
CMat input_impedance(const PartitionedImpedance& Z, const CVec& z_s,
                     double* cond_out = nullptr);

// Weights under the ideal (lossless, frequency-flat) matching network:
// W = (1 / (j 2 sqrt(R))) [ Re{Z_A}^{-1/2} ; -(Z_ss+Z_S)^{-1} Z_sa Re{Z_A}^{-1/2} ].
EmWeights em_weights_perfect(const PartitionedImpedance& Z, const CVec& z_s,
                             double R);

// Weights with a fixed series load z_l per active port instead of the ideal
// network: W = [ Q^{-1} ; -(Z_ss+Z_S)^{-1} Z_sa Q^{-1} ] with
// Q = Z_A + diag(z_l) + R I.
EmWeights em_weights_simplified(const PartitionedImpedance& Z, const CVec& z_s,
                                const CVec& z_l, double R);

// Powers and efficiencies for the excitation v_g (open-circuit source
// voltages). z_l is ignored under perfect matching. Throws
// DegenerateRadiatorError when the radiated power is not positive.
PowerReport power_report(const PartitionedImpedance& Z, const CVec& z_s,
                         const CVec& z_l, const EmWeights& W, const CVec& v_g,
                         double R);

// Impedance matrix of a layered (stacked-metasurface) geometry under the
// forward-propagation approximation: block lower bidiagonal with diagonal
// self-impedance blocks A_l and inter-layer coupling blocks B_l; every other
// entry, including the active-to-scatterer upper block, is exactly zero.
struct SimImpedance {
  PartitionedImpedance part;
  std::vector<int> layer_sizes;  // scatterer layers 1..L (layer 0 = actives)
};

SimImpedance build_sim_impedance(const DsaGeometry& g, double f);

// Last-layer currents per unit source voltage for the layered structure:
// W = (-1)^L Phi_L B_L ... Phi_1 B_1 Q^{-1} with Phi_l the inverse of
// (A_l + the layer's slice of Z_S) and Q = 2R I (active ports matched to the
// RF chain). Throws NetworkError naming the first near-singular layer.
CMat sim_em_weights(const SimImpedance& Z, const CVec& z_s, double R);

}  // namespace dsa
