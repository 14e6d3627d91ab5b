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

#include "dsa/config.hpp"
#include "dsa/geometry.hpp"
#include "dsa/optimizer.hpp"
#include "dsa/targets.hpp"

namespace dsa {

// f_k = f0 + (k - 1) W / K for k = 1..K.
std::vector<double> subcarrier_frequencies(const FrequencyConfig& fc);

DsaGeometry build_geometry(const ScenarioConfig& c);

// Maps a steering angle to the 1-based index of the closest ring test point
// (point t sits at azimuth 360 t / points).
int steering_index(double angle_deg, int points);

struct BeamRun {
  double angle_deg = 0.0;
  int subcarrier = 0;  // which (k, input) pair of a joint run this row is
  int input = 0;
  OptimizationResult opt;
  double d_steer_db = 0.0;  // at the exact steering direction
  double d_max_db = 0.0;    // over a 1-degree sphere grid
  double p_rad = 0.0;       // watts, at the reporting power scale
  PowerReport power;        // zeros on the layered path
  RVec cut_db;              // 1-degree azimuth cut
  int n_scatterer = 0;
};

// Optimizes every beam angle. With K * N_a = 1 each angle is an independent
// optimization; otherwise one joint run steers angle (k, m) on subcarrier k,
// input m (angles listed k-major) and the runs share the joint trace.
std::vector<BeamRun> run_beam(const ScenarioConfig& c, bool sim_path);

// Directivity at the steering angle under randomized load errors on the
// theta coordinates (metric in dB; eta_m alongside).
SensitivityResult beam_sensitivity(const ScenarioConfig& c,
                                   const BeamRun& nominal, double sigma_rel,
                                   bool sim_path);

struct MisoRun {
  OptimizationResult opt;
  std::vector<CMat> h_e2e;    // per subcarrier, T x N_a, physical scale
  double dominance_db = 0.0;  // min over rows of diag - max offdiag
  std::vector<double> se;     // one entry per miso.noise value
};

MisoRun run_miso(const ScenarioConfig& c, bool sim_path);

struct MimoRun {
  OptimizationResult opt;
  std::vector<CMat> h_e2e;    // per subcarrier, T x N_a
  RMat report_db;             // r x N_a combiner-side magnitude report
  double dominance_db = 0.0;  // min over report rows
  double se = 0.0;            // at mimo.noise
};

MimoRun run_mimo(const ScenarioConfig& c, bool sim_path);

// Worst-row diagonalization dominance under randomized load errors.
SensitivityResult mimo_sensitivity(const ScenarioConfig& c,
                                   const MimoRun& nominal, double sigma_rel);

// CLI-facing runners. Each writes its artifacts under out_dir (report.txt,
// config_resolved.txt, per-run pattern/trace/lambda files, manifest.txt last)
// and returns the manifest entries.
std::vector<std::string> run_scenario(const ScenarioConfig& c,
                                      const std::string& out_dir,
                                      int workers);
std::vector<std::string> run_sweep(const ScenarioConfig& c,
                                   const std::string& out_dir, int workers);
std::vector<std::string> run_compare_sim(const ScenarioConfig& c,
                                         const std::string& out_dir,
                                         int workers);

}  // namespace dsa
