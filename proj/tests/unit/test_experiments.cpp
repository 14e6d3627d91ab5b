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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dsa/experiments.hpp"

namespace fs = std::filesystem;

namespace {

// Small enough to optimize in well under a second.
dsa::ScenarioConfig tiny_beam_config() {
  dsa::ScenarioConfig c = dsa::parse_config(
      "usecase = beam\n"
      "geometry.rings = 2\n"
      "beam.points = 16\n"
      "beam.angles = 180 deg\n"
      "beam.target_rx_power = 0.05 W\n"
      "optimizer.iterations = 3\n"
      "seed = 5\n");
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("subcarriers tile the band from the carrier upward") {
  dsa::FrequencyConfig fc;
  fc.f0 = 2.4e9;
  fc.subcarriers = 4;
  fc.bandwidth = 0.2e9;
  const auto f = dsa::subcarrier_frequencies(fc);
  REQUIRE(f.size() == 4);
  CHECK(f[0] == 2.4e9);
  CHECK(f[1] == 2.45e9);
  CHECK(f[2] == 2.5e9);
  CHECK(f[3] == 2.55e9);

  fc.subcarriers = 1;
  fc.bandwidth = 0.0;
  const auto single = dsa::subcarrier_frequencies(fc);
  REQUIRE(single.size() == 1);
  CHECK(single[0] == 2.4e9);
}

TEST_CASE("steering angles snap to the nearest ring point") {
  CHECK(dsa::steering_index(180.0, 120) == 60);
  CHECK(dsa::steering_index(3.0, 120) == 1);
  CHECK(dsa::steering_index(-3.0, 120) == 119);
  CHECK(dsa::steering_index(0.0, 120) == 120);
  CHECK(dsa::steering_index(360.0, 120) == 120);
  CHECK(dsa::steering_index(721.4, 120) == 120);
  CHECK(dsa::steering_index(1.4, 120) == 120);
  CHECK(dsa::steering_index(1.6, 120) == 1);
  CHECK(dsa::steering_index(270.0, 4) == 3);
}

TEST_CASE("the disk geometry keeps its frozen population") {
  dsa::ScenarioConfig c = dsa::parse_config("");
  const dsa::DsaGeometry g = dsa::build_geometry(c);
  CHECK(g.n_active() == 1);
  CHECK(g.n_scatterer() == 94);

  c = dsa::parse_config("geometry.shape = sim-layers\n");
  const dsa::DsaGeometry layered = dsa::build_geometry(c);
  CHECK(layered.n_scatterer() == 94);
  CHECK(layered.has_layers());

  c = dsa::parse_config("geometry.stacks = 3\n");
  const dsa::DsaGeometry stacked = dsa::build_geometry(c);
  CHECK(stacked.n_scatterer() == 94 * 3);
  CHECK(stacked.n_active() == 1);
}

TEST_CASE("random deployments derive their stream from the root seed") {
  const std::string base =
      "geometry.shape = random\n"
      "geometry.disk_radius = 0.4 m\n"
      "geometry.density = 2\n";
  dsa::ScenarioConfig c1 = dsa::parse_config(base + "seed = 4\n");
  dsa::ScenarioConfig c2 = dsa::parse_config(base + "seed = 4\n");
  dsa::ScenarioConfig c3 = dsa::parse_config(base + "seed = 9\n");
  const dsa::DsaGeometry g1 = dsa::build_geometry(c1);
  const dsa::DsaGeometry g2 = dsa::build_geometry(c2);
  const dsa::DsaGeometry g3 = dsa::build_geometry(c3);

  const double lam = c1.lambda0();
  const int expected = static_cast<int>(
      std::lround(2.0 * dsa::kPi * 0.4 * 0.4 / (lam * lam)));
  CHECK(g1.n_scatterer() == expected);
  REQUIRE(g1.n() == g2.n());
  for (int n = 0; n < g1.n(); ++n)
    CHECK((g1.elements[static_cast<std::size_t>(n)].position -
           g2.elements[static_cast<std::size_t>(n)].position)
              .norm() == 0.0);
  bool any_moved = false;
  for (int n = 0; n < std::min(g1.n(), g3.n()); ++n)
    if ((g1.elements[static_cast<std::size_t>(n)].position -
         g3.elements[static_cast<std::size_t>(n)].position)
            .norm() > 0.0)
      any_moved = true;
  CHECK(any_moved);

  // An explicit geometry seed overrides the root-derived stream.
  dsa::ScenarioConfig o1 = dsa::parse_config(
      base + "seed = 4\ngeometry.seed = 77\n");
  dsa::ScenarioConfig o2 = dsa::parse_config(
      base + "seed = 9\ngeometry.seed = 77\n");
  const dsa::DsaGeometry h1 = dsa::build_geometry(o1);
  const dsa::DsaGeometry h2 = dsa::build_geometry(o2);
  REQUIRE(h1.n() == h2.n());
  for (int n = 0; n < h1.n(); ++n)
    CHECK((h1.elements[static_cast<std::size_t>(n)].position -
           h2.elements[static_cast<std::size_t>(n)].position)
              .norm() == 0.0);
}

TEST_CASE("geometries round trip through the file shape") {
  const dsa::DsaGeometry disk = dsa::build_geometry(dsa::parse_config(""));
  const std::string path = "experiments_geometry_test.csv";
  dsa::save_geometry_csv(disk, path);
  dsa::ScenarioConfig c = dsa::parse_config(
      "geometry.shape = file\ngeometry.path = " + path + "\n");
  const dsa::DsaGeometry loaded = dsa::build_geometry(c);
  fs::remove(path);
  REQUIRE(loaded.n() == disk.n());
  CHECK(loaded.n_active() == disk.n_active());
  for (int n = 0; n < disk.n(); ++n)
    CHECK((loaded.elements[static_cast<std::size_t>(n)].position -
           disk.elements[static_cast<std::size_t>(n)].position)
              .norm() < 1e-12);
}

TEST_CASE("beam runs are reproducible and fully populated") {
  const dsa::ScenarioConfig c = tiny_beam_config();
  const auto runs = dsa::run_beam(c, false);
  REQUIRE(runs.size() == 1);
  const dsa::BeamRun& r = runs.front();
  CHECK(r.angle_deg == 180.0);
  CHECK(r.n_scatterer == 19);
  CHECK(r.cut_db.size() == 360);
  CHECK(std::isfinite(r.d_steer_db));
  CHECK(r.d_max_db >= r.d_steer_db - 0.05);
  CHECK(r.p_rad > 0.0);
  CHECK(r.power.p_tx == doctest::Approx(c.beam.p_tx).epsilon(1e-9));
  CHECK(r.power.eta_m > 0.0);
  CHECK(r.opt.psi_hat.size() == 19 + 1);
  CHECK(!r.opt.trace.empty());

  const auto rerun = dsa::run_beam(c, false);
  REQUIRE(rerun.size() == 1);
  CHECK(rerun.front().d_steer_db == r.d_steer_db);
  CHECK(rerun.front().d_max_db == r.d_max_db);
  CHECK((rerun.front().opt.psi_hat - r.opt.psi_hat).norm() == 0.0);
  CHECK(rerun.front().opt.objective == r.opt.objective);
}

TEST_CASE("zero-deviation sensitivity reproduces the nominal metric") {
  dsa::ScenarioConfig c = tiny_beam_config();
  c.sensitivity.trials = 5;
  const auto runs = dsa::run_beam(c, false);
  REQUIRE(runs.size() == 1);
  const auto sens = dsa::beam_sensitivity(c, runs.front(), 0.0, false);
  REQUIRE(sens.metric.size() == 5);
  for (int t = 0; t < 5; ++t) {
    CHECK(sens.metric[t] == runs.front().d_steer_db);
    CHECK(sens.eta_m[t] == runs.front().power.eta_m);
  }
  CHECK(sens.mean == runs.front().d_steer_db);
  CHECK(sens.stdev == 0.0);

  const auto noisy = dsa::beam_sensitivity(c, runs.front(), 0.3, false);
  CHECK(noisy.stdev > 0.0);
  const auto noisy2 = dsa::beam_sensitivity(c, runs.front(), 0.3, false);
  CHECK(noisy.mean == noisy2.mean);
}

TEST_CASE("scenario artifacts are complete and indexed by the manifest") {
  const dsa::ScenarioConfig c = tiny_beam_config();
  const std::string out = "experiments_manifest_test_out";
  fs::remove_all(out);
  const auto entries = dsa::run_scenario(c, out, 1);

  REQUIRE(!entries.empty());
  CHECK(entries.back() == "manifest.txt");
  const std::set<std::string> unique(entries.begin(), entries.end());
  CHECK(unique.size() == entries.size());
  CHECK(unique.count("config_resolved.txt") == 1);
  CHECK(unique.count("report.txt") == 1);
  CHECK(unique.count("trace.csv") == 1);
  CHECK(unique.count("lambda_hat.csv") == 1);
  CHECK(unique.count("timings.txt") == 0);
  for (const auto& name : entries) {
    CAPTURE(name);
    CHECK(fs::exists(fs::path(out) / name));
    CHECK(fs::file_size(fs::path(out) / name) > 0);
  }
  CHECK(fs::exists(fs::path(out) / "timings.txt"));

  // manifest.txt lists every other artifact, one per line, in order.
  std::istringstream manifest(slurp(fs::path(out) / "manifest.txt"));
  std::vector<std::string> listed;
  std::string line;
  while (std::getline(manifest, line))
    if (!line.empty()) listed.push_back(line);
  REQUIRE(listed.size() == entries.size() - 1);
  for (std::size_t i = 0; i < listed.size(); ++i) CHECK(listed[i] == entries[i]);

  // The resolved config is the canonical echo.
  CHECK(slurp(fs::path(out) / "config_resolved.txt") == dsa::echo_config(c));

  // A second run reproduces the report byte for byte.
  const std::string report1 = slurp(fs::path(out) / "report.txt");
  fs::remove_all(out);
  dsa::run_scenario(c, out, 1);
  CHECK(slurp(fs::path(out) / "report.txt") == report1);
  fs::remove_all(out);
}
