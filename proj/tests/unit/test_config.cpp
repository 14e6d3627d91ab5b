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

#include <cstdio>
#include <fstream>
#include <string>

#include "dsa/config.hpp"

using dsa::parse_config;

TEST_CASE("an empty scenario file yields the documented defaults") {
  const dsa::ScenarioConfig c = parse_config("");
  CHECK(c.frequency.f0 == 2.4e9);
  CHECK(c.frequency.subcarriers == 1);
  CHECK(c.frequency.bandwidth == 0.0);
  CHECK(c.seed == 1);
  CHECK(c.usecase == dsa::UseCase::beam);
  CHECK(c.matching == dsa::MatchingTag::simplified);
  CHECK(c.rx_kind == dsa::ReceiverKind::half_wave_dipole);
  CHECK(c.rx_gain_db == 0.0);
  CHECK(c.r_chain == 50.0);
  CHECK(c.geometry.shape == dsa::GeometryShape::disk);
  CHECK(c.geometry.ring_step == c.lambda0() / 4.0);
  CHECK(c.geometry.rings == 5);
  CHECK(c.geometry.stacks == 1);
  CHECK(c.geometry.n_active == 1);
  CHECK(c.geometry.seed == 0);
  REQUIRE(c.beam.angles_deg.size() == 1);
  CHECK(c.beam.angles_deg[0] == 180.0);
  CHECK(c.beam.distance == 100.0);
  CHECK(c.beam.points == 120);
  CHECK(c.beam.target_rx_power == 0.45);
  CHECK(c.beam.p_tx == 1.0);
  CHECK(c.miso.noise_w.size() == 7);
  CHECK(c.mimo.rx_elements == 20);
  CHECK(c.mimo.rx_spacing == c.lambda0() / 2.0);
  CHECK(c.sensitivity.sigma_rel.empty());
  CHECK(c.sensitivity.trials == 30);
  CHECK(c.optimizer.n_i == 1500);
  CHECK(c.optimizer.n_alt == 1);
  CHECK(c.optimizer.init == dsa::OptimizerConfig::Init::random);
  CHECK(c.out_dir == "out");
}

TEST_CASE("unit suffixes convert into SI values") {
  const dsa::ScenarioConfig c = parse_config(
      "frequency.f0 = 3 GHz\n"
      "frequency.subcarriers = 4\n"
      "frequency.bandwidth = 0.1 GHz\n"
      "beam.distance = 2 lambda\n"
      "beam.p_tx = 10 dBm\n"
      "beam.target_rx_power = 0.2 W\n"
      "beam.angles = 90, 180, 270 deg\n"
      "receiver.gain = 3 dB\n"
      "chain_resistance = 75 ohm\n"
      "geometry.ring_step = 0.125 m\n"
      "geometry.seed = 7\n"
      "seed = 12\n");
  CHECK(c.frequency.f0 == 3e9);
  CHECK(c.frequency.subcarriers == 4);
  CHECK(c.frequency.bandwidth == 1e8);
  const double lambda = dsa::wavelength(3e9);
  CHECK(c.beam.distance == doctest::Approx(2.0 * lambda).epsilon(1e-15));
  CHECK(c.beam.p_tx == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(c.beam.target_rx_power == 0.2);
  REQUIRE(c.beam.angles_deg.size() == 3);
  CHECK(c.beam.angles_deg[1] == 180.0);
  CHECK(c.rx_gain_db == 3.0);
  CHECK(c.r_chain == 75.0);
  CHECK(c.geometry.ring_step == 0.125);
  CHECK(c.geometry.seed == 7);
  CHECK(c.seed == 12);
}

TEST_CASE("comments and blank lines are ignored") {
  const dsa::ScenarioConfig c = parse_config(
      "# a comment line\n"
      "\n"
      "seed = 3   # trailing comment\n"
      "   usecase   =   miso   \n");
  CHECK(c.seed == 3);
  CHECK(c.usecase == dsa::UseCase::miso);
}

TEST_CASE("malformed scenario files are rejected with config errors") {
  CHECK_THROWS_AS(parse_config("seed = 1\nseed = 2\n"), dsa::ConfigError);
  CHECK_THROWS_AS(parse_config("bogus_key = 1\n"), dsa::ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("bogus_key = 1\n"),
                       doctest::Contains("unknown keys: bogus_key"),
                       dsa::ConfigError);
  CHECK_THROWS_AS(parse_config("frequency.f0 = 2.4\n"), dsa::ConfigError);
  CHECK_THROWS_AS(parse_config("frequency.f0 = 2.4 m\n"), dsa::ConfigError);
  CHECK_THROWS_AS(parse_config("frequency.f0 = fast GHz\n"), dsa::ConfigError);
  CHECK_THROWS_AS(parse_config("geometry.rings = 2.5\n"), dsa::ConfigError);
  CHECK_THROWS_AS(parse_config("geometry.density = 3 m\n"), dsa::ConfigError);
  CHECK_THROWS_AS(parse_config("just a line\n"), dsa::ConfigError);
  CHECK_THROWS_AS(parse_config("= 3\n"), dsa::ConfigError);
  CHECK_THROWS_AS(parse_config("usecase = bogus\n"), dsa::ConfigError);
  CHECK_THROWS_AS(parse_config("matching = none\n"), dsa::ConfigError);
  CHECK_THROWS_AS(parse_config("receiver.kind = horn\n"), dsa::ConfigError);
  CHECK_THROWS_AS(parse_config("optimizer.init = warm\n"), dsa::ConfigError);
  CHECK_THROWS_AS(parse_config("geometry.shape = cube\n"), dsa::ConfigError);
  CHECK_THROWS_AS(parse_config("beam.angles = 90 deg, 1 GHz\n"),
                  dsa::ConfigError);
  CHECK_THROWS_AS(parse_config("beam.angles = 90,,180 deg\n"),
                  dsa::ConfigError);
  CHECK_THROWS_AS(parse_config("sweep.values = 1, 2\n"), dsa::ConfigError);
}

TEST_CASE("semantic validation catches inconsistent scenarios") {
  CHECK_THROWS_AS(parse_config("frequency.subcarriers = 4\n"),
                  dsa::ConfigError);
  CHECK_NOTHROW(parse_config(
      "frequency.subcarriers = 4\nfrequency.bandwidth = 0.01 GHz\n"));
  CHECK_THROWS_AS(parse_config("geometry.rings = 0\n"), dsa::ConfigError);
  CHECK_THROWS_AS(
      parse_config("geometry.shape = sim-layers\ngeometry.stacks = 2\n"),
      dsa::ConfigError);
  CHECK_THROWS_AS(parse_config("geometry.shape = file\n"), dsa::ConfigError);
  CHECK_THROWS_AS(
      parse_config("geometry.shape = random\ngeometry.density = 0\n"),
      dsa::ConfigError);
  CHECK_THROWS_AS(parse_config("beam.points = 0\n"), dsa::ConfigError);
  CHECK_THROWS_AS(parse_config("miso.noise = 0 W\n"), dsa::ConfigError);
  CHECK_THROWS_AS(parse_config("usecase = mimo-precoder\n"),
                  dsa::ConfigError);
  CHECK_NOTHROW(parse_config(
      "usecase = mimo-precoder\ngeometry.n_active = 4\n"));
  CHECK_THROWS_AS(
      parse_config("usecase = mimo-precoder\ngeometry.n_active = 4\n"
                   "mimo.rank = 30\n"),
      dsa::ConfigError);
  CHECK_THROWS_AS(parse_config("usecase = sweep\n"), dsa::ConfigError);
  CHECK_THROWS_AS(
      parse_config("usecase = sweep\nsweep.axis = length\n"
                   "sweep.values = 1, 2\n"),
      dsa::ConfigError);
  CHECK_NOTHROW(parse_config(
      "usecase = sweep\nsweep.axis = rings\nsweep.values = 2, 3, 5\n"));
  CHECK_THROWS_AS(parse_config("optimizer.iterations = 0\n"),
                  dsa::ConfigError);
  CHECK_THROWS_AS(parse_config("sensitivity.trials = 0\n"), dsa::ConfigError);
}

TEST_CASE("echoed configs parse back to the identical echo") {
  const char* scenarios[] = {
      "",
      "usecase = beam\nbeam.angles = 180, 210.5, 240 deg\n"
      "beam.target_rx_power = 0.3 W\nsensitivity.sigma_rel = 0.1, 0.2\n"
      "geometry.stacks = 3\noptimizer.iterations = 700\nseed = 9\n",
      "usecase = miso\nmiso.p_tx = 20 dBm\nmiso.noise = 1e-15, 1e-14 W\n"
      "matching = perfect\nreceiver.kind = isotropic\n",
      "usecase = mimo-precoder\ngeometry.n_active = 4\nmimo.rank = 4\n"
      "mimo.scatter_angles = -30, 40 deg\nmimo.scatter_gains = -40, -50 dB\n"
      "frequency.subcarriers = 8\nfrequency.bandwidth = 0.2 GHz\n",
      "usecase = sweep\nsweep.axis = ring_step\n"
      "sweep.values = 0.015614190520833333, 0.031228381041666666, "
      "0.062456762083333331 m\n",
      "usecase = sweep\nsweep.axis = noise\nsweep.values = 1e-15, 1e-13\n",
      "geometry.shape = random\ngeometry.density = 2.5\n"
      "geometry.disk_radius = 0.25 m\n",
  };
  for (const char* text : scenarios) {
    CAPTURE(text);
    const std::string echo1 = dsa::echo_config(parse_config(text));
    const std::string echo2 = dsa::echo_config(parse_config(echo1));
    CHECK(echo1 == echo2);
  }
}

TEST_CASE("the echo only carries blocks the use case consumes") {
  const std::string beam = dsa::echo_config(parse_config("usecase = beam\n"));
  CHECK(beam.find("beam.angles") != std::string::npos);
  CHECK(beam.find("miso.") == std::string::npos);
  CHECK(beam.find("mimo.") == std::string::npos);
  CHECK(beam.find("sweep.") == std::string::npos);

  const std::string miso = dsa::echo_config(parse_config("usecase = miso\n"));
  CHECK(miso.find("miso.angles") != std::string::npos);
  CHECK(miso.find("beam.") == std::string::npos);

  const std::string mimo = dsa::echo_config(parse_config(
      "usecase = mimo-precoder\ngeometry.n_active = 4\n"));
  CHECK(mimo.find("mimo.rank") != std::string::npos);
  CHECK(mimo.find("beam.") == std::string::npos);
  CHECK(mimo.find("miso.") == std::string::npos);

  const std::string sweep = dsa::echo_config(parse_config(
      "usecase = sweep\nsweep.axis = noise\nsweep.values = 1e-15\n"));
  CHECK(sweep.find("sweep.axis = noise") != std::string::npos);
  CHECK(sweep.find("miso.angles") != std::string::npos);
  CHECK(sweep.find("beam.") == std::string::npos);
}

TEST_CASE("config files load from disk") {
  const std::string path = "config_loader_test.cfg";
  {
    std::ofstream out(path);
    out << "seed = 21\nusecase = beam\nbeam.points = 64\n";
  }
  const dsa::ScenarioConfig c = dsa::load_config(path);
  std::remove(path.c_str());
  CHECK(c.seed == 21);
  CHECK(c.beam.points == 64);
  CHECK_THROWS_AS(dsa::load_config("no_such_config_file.cfg"), dsa::IoError);
}
