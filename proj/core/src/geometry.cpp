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

#include "dsa/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dsa/rng.hpp"

namespace dsa {

int DsaGeometry::n_active() const {
  int c = 0;
  for (const auto& e : elements)
    if (e.kind == ElementKind::active) ++c;
  return c;
}

bool DsaGeometry::has_layers() const {
  if (elements.empty()) return false;
  return std::all_of(elements.begin(), elements.end(),
                     [](const DipoleElement& e) { return e.layer >= 0; });
}

int DsaGeometry::num_layers() const {
  int l = 0;
  for (const auto& e : elements) l = std::max(l, e.layer);
  return l;
}

std::vector<int> DsaGeometry::layer_sizes() const {
  std::vector<int> sizes(static_cast<std::size_t>(num_layers()), 0);
  for (const auto& e : elements)
    if (e.layer >= 1) ++sizes[static_cast<std::size_t>(e.layer - 1)];
  return sizes;
}

double DsaGeometry::bounding_radius() const {
  double r = 0.0;
  for (const auto& e : elements)
    r = std::max(r, e.position.norm() + 0.5 * e.length);
  return r;
}

void validate(const DsaGeometry& g) {
  if (g.elements.empty()) throw GeometryError("empty element list");
  int first_scatterer = -1;
  for (int i = 0; i < g.n(); ++i) {
    const auto& e = g.elements[static_cast<std::size_t>(i)];
    if (!(e.length > 0.0)) throw GeometryError("element length must be positive");
    if (!(e.wire_radius > 0.0))
      throw GeometryError("wire radius must be positive");
    if (e.wire_radius > 0.05 * e.length)
      throw GeometryError("wire radius exceeds 5% of element length");
    if (std::abs(e.orientation.norm() - 1.0) > 1e-12)
      throw GeometryError("orientation must be a unit vector");
    if (e.kind == ElementKind::scatterer && first_scatterer < 0)
      first_scatterer = i;
    if (e.kind == ElementKind::active && first_scatterer >= 0)
      throw GeometryError("active elements must precede all scatterers");
  }
  if (g.n_active() < 1) throw GeometryError("at least one active element required");
  for (int i = 0; i < g.n(); ++i) {
    for (int j = i + 1; j < g.n(); ++j) {
      const auto& a = g.elements[static_cast<std::size_t>(i)];
      const auto& b = g.elements[static_cast<std::size_t>(j)];
      const double min_dist = 2.0 * std::max(a.wire_radius, b.wire_radius);
      if ((a.position - b.position).norm() <= min_dist)
        throw GeometryError("elements " + std::to_string(i) + " and " +
                            std::to_string(j) + " are closer than twice the wire radius");
    }
  }
  bool any_layer = false, all_layer = true;
  for (const auto& e : g.elements) {
    if (e.layer >= 0)
      any_layer = true;
    else
      all_layer = false;
  }
  if (any_layer && !all_layer)
    throw GeometryError("layer annotations must cover all elements or none");
  if (all_layer) {
    for (const auto& e : g.elements) {
      const bool active = e.kind == ElementKind::active;
      if (active != (e.layer == 0))
        throw GeometryError("layer 0 must contain exactly the active elements");
    }
    const auto sizes = g.layer_sizes();
    for (std::size_t l = 0; l < sizes.size(); ++l)
      if (sizes[l] == 0)
        throw GeometryError("layer " + std::to_string(l + 1) + " is empty");
  }
}

namespace {

void fill_defaults(RingDiskSpec& s) {
  if (!(s.frequency > 0.0)) throw GeometryError("generator frequency must be positive");
  const double lam = wavelength(s.frequency);
  if (s.element_length <= 0.0) s.element_length = 0.5 * lam;
  if (s.wire_radius <= 0.0) s.wire_radius = lam / 1000.0;
  if (s.stack_step <= 0.0) s.stack_step = 0.5 * lam;
}

std::vector<DipoleElement> make_actives(const RingDiskSpec& s) {
  std::vector<DipoleElement> out;
  for (int m = 0; m < s.num_active; ++m) {
    DipoleElement e;
    e.kind = ElementKind::active;
    e.layer = 0;
    e.length = s.element_length;
    e.wire_radius = s.wire_radius;
    if (s.num_active > 1) {
      const double a = 2.0 * kPi * m / s.num_active;
      const double r = 0.5 * s.ring_step;
      e.position = Vec3(r * std::cos(a), r * std::sin(a), 0.0);
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace

DsaGeometry make_disk_geometry(const RingDiskSpec& spec) {
  RingDiskSpec s = spec;
  fill_defaults(s);
  if (s.rings < 1) throw GeometryError("disk generator needs at least one ring");
  if (s.stacks < 1) throw GeometryError("stack count must be at least 1");
  if (s.num_active < 1) throw GeometryError("at least one active element required");
  if (!(s.ring_step > 0.0)) throw GeometryError("ring step must be positive");

  const double lam = wavelength(s.frequency);
  const double d_arc = std::min(s.ring_step, lam / 4.0);

  DsaGeometry g;
  g.elements = make_actives(s);
  for (int st = 0; st < s.stacks; ++st) {
    const double z = (st - 0.5 * (s.stacks - 1)) * s.stack_step;
    for (int l = 1; l <= s.rings; ++l) {
      const double radius = l * s.ring_step;
      const int count =
          static_cast<int>(std::lround(2.0 * kPi * radius / d_arc));
      for (int j = 0; j < count; ++j) {
        const double a = 2.0 * kPi * j / count;
        DipoleElement e;
        e.kind = ElementKind::scatterer;
        e.layer = l;
        e.length = s.element_length;
        e.wire_radius = s.wire_radius;
        e.position = Vec3(radius * std::cos(a), radius * std::sin(a), z);
        g.elements.push_back(e);
      }
    }
  }
  validate(g);
  return g;
}

DsaGeometry make_random_disk_geometry(double disk_radius, int num_scatterers,
                                      const RingDiskSpec& base,
                                      std::uint64_t seed) {
  RingDiskSpec s = base;
  fill_defaults(s);
  if (!(disk_radius > 0.0)) throw GeometryError("disk radius must be positive");
  if (num_scatterers < 0) throw GeometryError("scatterer count must be non-negative");

  DsaGeometry g;
  if (s.ring_step <= 0.0) s.ring_step = disk_radius;  // active spread fallback
  g.elements = make_actives(s);

  SplitMix64 rng(seed);
  const double min_dist = 4.0 * s.wire_radius;
  int placed = 0;
  long attempts = 0;
  const long max_attempts = 10000L * (num_scatterers + 1);
  while (placed < num_scatterers) {
    if (++attempts > max_attempts)
      throw GeometryError("random deployment failed: density too high");
    const double r = disk_radius * std::sqrt(rng.uniform01());
    const double a = 2.0 * kPi * rng.uniform01();
    const Vec3 p(r * std::cos(a), r * std::sin(a), 0.0);
    bool ok = true;
    for (const auto& e : g.elements) {
      if ((e.position - p).norm() <= min_dist) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    DipoleElement e;
    e.kind = ElementKind::scatterer;
    e.length = s.element_length;
    e.wire_radius = s.wire_radius;
    e.position = p;
    g.elements.push_back(e);
    ++placed;
  }
  for (auto& e : g.elements) e.layer = -1;
  validate(g);
  return g;
}

DsaGeometry load_geometry_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open geometry file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty geometry file: " + path);

  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok.erase(0, tok.find_first_not_of(" \t\r"));
      tok.erase(tok.find_last_not_of(" \t\r") + 1);
      out.push_back(tok);
    }
    return out;
  };

  const auto header = split(line);
  const std::vector<std::string> req = {"kind", "x",  "y",  "z", "length",
                                        "radius", "ox", "oy", "oz"};
  if (header.size() < req.size())
    throw IoError("geometry header must list kind,x,y,z,length,radius,ox,oy,oz");
  for (std::size_t i = 0; i < req.size(); ++i)
    if (header[i] != req[i])
      throw IoError("unexpected geometry column '" + header[i] + "', wanted '" +
                    req[i] + "'");
  const bool has_layer = header.size() > req.size() && header[req.size()] == "layer";

  DsaGeometry g;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto f = split(line);
    if (f.size() < req.size())
      throw IoError("geometry line " + std::to_string(lineno) + ": too few fields");
    DipoleElement e;
    if (f[0] == "active")
      e.kind = ElementKind::active;
    else if (f[0] == "scatterer")
      e.kind = ElementKind::scatterer;
    else
      throw IoError("geometry line " + std::to_string(lineno) +
                    ": kind must be active or scatterer");
    try {
      e.position = Vec3(std::stod(f[1]), std::stod(f[2]), std::stod(f[3]));
      e.length = std::stod(f[4]);
      e.wire_radius = std::stod(f[5]);
      e.orientation = Vec3(std::stod(f[6]), std::stod(f[7]), std::stod(f[8]));
      if (has_layer && f.size() > req.size()) e.layer = std::stoi(f[req.size()]);
    } catch (const std::exception&) {
      throw IoError("geometry line " + std::to_string(lineno) + ": bad number");
    }
    g.elements.push_back(e);
  }
  validate(g);
  return g;
}

void save_geometry_csv(const DsaGeometry& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write geometry file: " + path);
  const bool layered = g.has_layers();
  out << "kind,x,y,z,length,radius,ox,oy,oz";
  if (layered) out << ",layer";
  out << "\n";
  out.precision(17);
  for (const auto& e : g.elements) {
    out << (e.kind == ElementKind::active ? "active" : "scatterer") << ','
        << e.position.x() << ',' << e.position.y() << ',' << e.position.z()
        << ',' << e.length << ',' << e.wire_radius << ',' << e.orientation.x()
        << ',' << e.orientation.y() << ',' << e.orientation.z();
    if (layered) out << ',' << e.layer;
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace dsa
