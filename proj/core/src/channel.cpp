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

#include "dsa/channel.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace dsa {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string tok;
  std::istringstream is(line);
  while (std::getline(is, tok, ',')) {
    const auto b = tok.find_first_not_of(" \t\r");
    const auto e = tok.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string()
                                         : tok.substr(b, e - b + 1));
  }
  return out;
}

// One far-field hop between two points. A null axis stands for an isotropic
// end with the constant effective length lambda/pi.
Cplx hop(const Vec3& tx_pos, const Vec3* tx_axis, const Vec3& rx_pos,
         const Vec3* rx_axis, double lambda) {
  const Vec3 d = rx_pos - tx_pos;
  const double r = d.norm();
  if (r <= 0.0)
    throw GeometryError("transmit and receive points coincide");
  const double iso = lambda / kPi;
  const double lt =
      tx_axis ? dipole_effective_length(tx_axis->dot(d) / r, lambda) : iso;
  const double lr =
      rx_axis ? dipole_effective_length(rx_axis->dot(d) / r, lambda) : iso;
  const double mag = kFreeSpaceImpedance / (2.0 * lambda * r) * lt * lr;
  const double phase = -2.0 * kPi * r / lambda;
  return Cplx(0.0, mag) * std::exp(Cplx(0.0, phase));
}

void warn_if_inside_fraunhofer(const DsaGeometry& g,
                               const std::vector<Vec3>& positions,
                               double lambda) {
  const double diameter = 2.0 * g.bounding_radius();
  const double d_f = 2.0 * diameter * diameter / lambda;
  for (const auto& p : positions) {
    if (p.norm() < d_f) {
      static std::atomic<bool> warned{false};
      if (!warned.exchange(true))
        std::cerr << "dsa: receive point at " << p.norm()
                  << " m is inside the Fraunhofer distance " << d_f << " m\n";
      return;
    }
  }
}

void check_clearance(const DsaGeometry& g, const std::vector<Vec3>& positions,
                     double lambda) {
  const double min_r = g.bounding_radius() + 2.0 * lambda;
  for (const auto& p : positions)
    if (p.norm() < min_r)
      throw GeometryError(
          "test point inside the radiative-region clearance of two "
          "wavelengths around the array");
}

const Vec3* receiver_axis(ReceiverKind kind) {
  static const Vec3 z = Vec3::UnitZ();
  return kind == ReceiverKind::half_wave_dipole ? &z : nullptr;
}

}  // namespace

void TestPointSet::validate() const {
  if (positions.empty()) throw GeometryError("test point set is empty");
  if (!(receive_gain >= 0.0))
    throw ConfigError("receive gain must be nonnegative");
}

void NlosSpec::validate() const {
  if (positions.empty()) throw GeometryError("point-scatterer set is empty");
  if (positions.size() != coefficients.size())
    throw GeometryError("one reflection coefficient per scatterer required");
}

NoiseModel awgn_power(double sigma2) {
  if (!(sigma2 >= 0.0)) throw ConfigError("noise power must be nonnegative");
  return NoiseModel{sigma2};
}

double dipole_effective_length(double cos_angle, double lambda) {
  const double s2 = 1.0 - cos_angle * cos_angle;
  if (s2 <= 1e-24) return 0.0;
  return lambda / kPi * std::cos(0.5 * kPi * cos_angle) / std::sqrt(s2);
}

Transimpedance los_transimpedance(const DsaGeometry& g,
                                  const TestPointSet& pts, double f) {
  pts.validate();
  if (!(f > 0.0)) throw ConfigError("frequency must be positive");
  const double lambda = wavelength(f);
  check_clearance(g, pts.positions, lambda);
  warn_if_inside_fraunhofer(g, pts.positions, lambda);

  const double root_gain = std::sqrt(pts.receive_gain);
  const Vec3* rx_axis = receiver_axis(pts.kind);
  Transimpedance out;
  out.f = f;
  out.h.resize(pts.size(), g.n());
  for (int t = 0; t < pts.size(); ++t)
    for (int n = 0; n < g.n(); ++n) {
      const auto& e = g.elements[static_cast<std::size_t>(n)];
      out.h(t, n) =
          root_gain * hop(e.position, &e.orientation,
                          pts.positions[static_cast<std::size_t>(t)], rx_axis,
                          lambda);
    }
  return out;
}

Transimpedance nlos_transimpedance(const DsaGeometry& g,
                                   const TestPointSet& pts,
                                   const NlosSpec& spec, double f) {
  pts.validate();
  spec.validate();
  if (!(f > 0.0)) throw ConfigError("frequency must be positive");
  const double lambda = wavelength(f);
  check_clearance(g, pts.positions, lambda);
  warn_if_inside_fraunhofer(g, spec.positions, lambda);

  const double root_gain = std::sqrt(pts.receive_gain);
  const Vec3* rx_axis = receiver_axis(pts.kind);
  Transimpedance out;
  out.f = f;
  out.h = CMat::Zero(pts.size(), g.n());
  for (std::size_t s = 0; s < spec.positions.size(); ++s) {
    const Vec3& sp = spec.positions[s];
    CVec to_scatterer(g.n());
    for (int n = 0; n < g.n(); ++n) {
      const auto& e = g.elements[static_cast<std::size_t>(n)];
      to_scatterer[n] = hop(e.position, &e.orientation, sp, nullptr, lambda);
    }
    CVec to_points(pts.size());
    for (int t = 0; t < pts.size(); ++t)
      to_points[t] =
          root_gain * hop(sp, nullptr,
                          pts.positions[static_cast<std::size_t>(t)], rx_axis,
                          lambda);
    out.h += spec.coefficients[s] * (to_points * to_scatterer.transpose());
  }
  return out;
}

std::vector<Vec3> ring_positions(double d, int T) {
  if (T < 1) throw GeometryError("ring needs at least one point");
  if (!(d > 0.0)) throw GeometryError("ring radius must be positive");
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(T));
  for (int t = 1; t <= T; ++t) {
    const double a = 2.0 * kPi * t / T;
    out.emplace_back(d * std::cos(a), d * std::sin(a), 0.0);
  }
  return out;
}

std::vector<Vec3> ula_positions(const Vec3& center, int T, double spacing,
                                const Vec3& axis) {
  if (T < 1) throw GeometryError("array needs at least one element");
  const double norm = axis.norm();
  if (!(norm > 0.0)) throw GeometryError("array axis must be nonzero");
  const Vec3 u = axis / norm;
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(T));
  for (int i = 0; i < T; ++i)
    out.push_back(center + (i - 0.5 * (T - 1)) * spacing * u);
  return out;
}

std::vector<Vec3> load_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + " is empty");
  const auto header = split_csv(line);
  if (header.size() < 3 || header[0] != "x" || header[1] != "y" ||
      header[2] != "z")
    throw IoError(path + ": expected header x,y,z");
  std::vector<Vec3> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() < 3) throw IoError(path + ": short row");
    out.emplace_back(std::stod(f[0]), std::stod(f[1]), std::stod(f[2]));
  }
  return out;
}

NlosSpec load_nlos_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + " is empty");
  const auto header = split_csv(line);
  if (header.size() < 5 || header[0] != "x" || header[1] != "y" ||
      header[2] != "z" || header[3] != "re" || header[4] != "im")
    throw IoError(path + ": expected header x,y,z,re,im");
  NlosSpec out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() < 5) throw IoError(path + ": short row");
    out.positions.emplace_back(std::stod(f[0]), std::stod(f[1]),
                               std::stod(f[2]));
    out.coefficients.emplace_back(std::stod(f[3]), std::stod(f[4]));
  }
  return out;
}

}  // namespace dsa
