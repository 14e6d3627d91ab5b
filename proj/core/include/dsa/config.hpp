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
#include <string>
#include <vector>

#include "dsa/channel.hpp"
#include "dsa/multiport.hpp"
#include "dsa/optimizer.hpp"

namespace dsa {

// Scenario files are flat `key = value` text. Every physical quantity
// carries a unit suffix (frequencies GHz, distances m or lambda, powers W or
// dBm, angles deg, resistances ohm, gains dB); bare numbers are only valid
// for dimensionless fields. `lambda`-suffixed distances resolve against
// frequency.f0. Unknown and duplicate keys are rejected.

enum class GeometryShape { disk, cylinder, random, sim_layers, file };
enum class UseCase { beam, miso, mimo_precoder, sweep };

struct GeometryConfig {
  GeometryShape shape = GeometryShape::disk;
  double ring_step = 0.0;    // meters; 0 = lambda/4 default
  int rings = 5;             // L
  int stacks = 1;            // L_R
  int n_active = 1;
  double density = 3.0;      // scatterers per square wavelength (random)
  double disk_radius = 0.0;  // meters (random); 0 = rings * ring_step
  std::uint64_t seed = 0;    // 0 = derived from the root seed
  std::string path;          // shape = file
};

struct FrequencyConfig {
  double f0 = 2.4e9;       // hertz
  int subcarriers = 1;     // K
  double bandwidth = 0.0;  // hertz, total W; f_k = f0 + (k-1) W / K
};

struct BeamConfig {
  std::vector<double> angles_deg{180.0};
  double distance = 100.0;  // meters, test-ring radius
  int points = 120;         // T
  double target_rx_power = 0.45;  // watts, per steered test point
  double p_tx = 1.0;              // watts, reported power scale
};

struct MisoConfig {
  std::vector<double> angles_deg{-40.0, 20.0, 80.0, 200.0};
  double distance = 100.0;
  double p_tx = 0.01;
  std::vector<double> noise_w{1e-18, 1e-17, 1e-16, 1e-15, 1e-14, 1e-13,
                              1e-12};
};

struct MimoConfig {
  double user_distance = 10.0;  // meters, ULA center on the x axis
  int rx_elements = 20;
  double rx_spacing = 0.0;  // meters; 0 = lambda/2 default
  std::vector<double> scatter_angles_deg{-43.0, -14.0, 14.0, 43.0, 72.0};
  double scatter_distance = 5.0;
  std::vector<double> scatter_gains_db{-37.3, -39.8, -42.0, -48.8, -82.0};
  int rank = 4;
  double p_tx = 0.01;
  double noise = 1e-12;
};

struct SensitivityConfig {
  std::vector<double> sigma_rel;  // empty = no sensitivity pass
  int trials = 30;
};

struct SweepConfig {
  std::string axis;  // ring_step | rings | stacks | sigma_rel | noise
  std::vector<double> values;
};

struct ScenarioConfig {
  GeometryConfig geometry;
  FrequencyConfig frequency;
  MatchingTag matching = MatchingTag::simplified;
  ReceiverKind rx_kind = ReceiverKind::half_wave_dipole;
  double rx_gain_db = 0.0;
  double r_chain = 50.0;
  VaractorParams varactor;
  UseCase usecase = UseCase::beam;
  BeamConfig beam;
  MisoConfig miso;
  MimoConfig mimo;
  SensitivityConfig sensitivity;
  SweepConfig sweep;
  OptimizerConfig optimizer;
  std::uint64_t seed = 1;  // root seed; optimizer/geometry substreams
  std::string out_dir = "out";

  double lambda0() const;
  void validate() const;
};

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

// Canonical serialization: fixed key order, SI units (GHz, m, W, deg, dB),
// full precision. Parsing the echo reproduces the config exactly.
std::string echo_config(const ScenarioConfig& c);

const char* to_string(GeometryShape s);
const char* to_string(UseCase u);

}  // namespace dsa
