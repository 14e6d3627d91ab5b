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

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dsa/channel.hpp"
#include "dsa/geometry.hpp"
#include "dsa/types.hpp"

namespace dsa {

enum class TargetKind { beam, zero_forcing, svd_precoder, custom };

// Desired end-to-end response per subcarrier, plus the auxiliary data the
// builders produced (steering indices, receive-power scale, retained rank,
// SVD combiner and gains).
struct TargetSpec {
  TargetKind kind = TargetKind::custom;
  std::vector<CMat> h_opt;  // K matrices, T x N_a

  std::vector<std::vector<int>> steer;  // beam: 1-based index per (k, input)
  double p_rx = 0.0;                    // beam: desired receive power scale
  int rank = 0;                         // svd: retained rank r
  std::vector<CMat> combiner;           // svd: U_k, T x r
  std::vector<RVec> gains;              // svd: singular values, length r
};

// One-hot beam-steering targets: column n of H_opt,k is sqrt(p_rx) at test
// point steer[k][n] (1-based) and zero elsewhere. All columns share T rows.
TargetSpec beam_target(int T, const std::vector<std::vector<int>>& steer,
                       double p_rx);

// Zero-forcing target H_opt,k = H_C(f_k) H_C(f_k)^+, stored from the explicit
// pseudo-inverse product. Requires full row rank (smallest singular value
// above 1e-10 relative); the error reports the numerical rank.
TargetSpec zf_target(const std::vector<Transimpedance>& h_c);

// Rank-r SVD precoder target: H_opt,k = U_k diag(Lambda_k) from the leading
// r left singular vectors and singular values of H_C(f_k). Requires
// sigma_r / sigma_1 >= 1e-10.
TargetSpec svd_target(const std::vector<Transimpedance>& h_c, int r);

// Equal-angle direction grid with midpoint colatitude samples and quadrature
// weights sin(theta) dtheta dphi, so weights.sum() is 4 pi up to quadrature
// error.
struct SphereGrid {
  std::vector<Vec3> directions;
  RVec weights;
  int n_theta = 0;
  int n_phi = 0;
};

SphereGrid make_sphere_grid(double step_deg);

// Unit directions in the z = 0 plane at phi = 0, step, 2 step, ...
std::vector<Vec3> azimuth_cut_directions(double step_deg);

// Radiation intensity (watts per steradian) of the current vector i by
// coherent far-field superposition of half-wave-dipole element patterns:
// U = eta/(4 lambda^2) |sum_n l_e(theta_n) i_n e^{j k dir.p_n}|^2. Throws on
// a zero current vector.
RVec radiation_intensity(const CVec& i, const DsaGeometry& g, double f,
                         const std::vector<Vec3>& directions);

double integrate_over_sphere(const SphereGrid& grid, const RVec& u);

// Directivity per direction, D = 4 pi U / p_rad, with p_rad from the Re{Z}
// quadratic form (module multiport). Throws DegenerateRadiatorError on
// non-positive p_rad.
RVec directivity_values(const RVec& u, double p_rad);

// Pattern export: azimuth_deg,elevation_deg,directivity_db rows.
void save_pattern_csv(const std::string& path,
                      const std::vector<Vec3>& directions, const RVec& d);

// Sum spectral efficiency of a square end-to-end channel under equal power
// split: SE = sum_t log2(1 + SINR_t) with
// SINR_t = |H_tt|^2 (p_tx/N_a) / (sum_{j != t} |H_tj|^2 (p_tx/N_a) + sigma2).
// Throws when sigma2 = 0 meets an interference-free row.
double sum_spectral_efficiency(const CMat& h, double sigma2, double p_tx);

// Entrywise 20 log10 |U^H H| in dB (may contain -inf for exact zeros).
RMat diagonalization_report(const CMat& u, const CMat& h);

// Metric under randomized load-parameter implementation errors. The first
// n_perturb coordinates of psi receive errors d_n ~ N(0, (sigma_rel
// |psi_n|)^2), trial t drawing from substream_seed(seed, t). The evaluator
// returns (metric, eta_m) for a perturbed vector.
using MetricEvaluator =
    std::function<std::pair<double, double>(const RVec& psi)>;

struct SensitivityResult {
  RVec metric;  // one entry per trial
  RVec eta_m;
  double mean = 0.0;
  double stdev = 0.0;
};

SensitivityResult sensitivity_analysis(const RVec& psi_star, int n_perturb,
                                       double sigma_rel, int trials,
                                       std::uint64_t seed,
                                       const MetricEvaluator& evaluate);

}  // namespace dsa
