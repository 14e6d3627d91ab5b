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

#include "dsa/types.hpp"

namespace dsa {

enum class ElementKind { active, scatterer };

// One thin-wire dipole. length is the full tip-to-tip length; orientation is
// the wire axis (unit vector). layer is an optional annotation used by the
// layered (SIM) network mode: 0 marks active elements, 1..L scatterer layers,
// -1 means unannotated.
struct DipoleElement {
  Vec3 position = Vec3::Zero();
  Vec3 orientation = Vec3::UnitZ();
  double length = 0.0;
  double wire_radius = 0.0;
  ElementKind kind = ElementKind::scatterer;
  int layer = -1;
};

// Ordered element collection: all active elements first, then scatterers.
// That ordering is canonical and drives the block partitioning of Z.
struct DsaGeometry {
  std::vector<DipoleElement> elements;

  int n() const { return static_cast<int>(elements.size()); }
  int n_active() const;
  int n_scatterer() const { return n() - n_active(); }

  // True when every element carries a layer annotation.
  bool has_layers() const;

  // Number of scatterer layers L (max annotation), 0 when unannotated.
  int num_layers() const;

  // Scatterer counts per layer 1..L. Requires has_layers().
  std::vector<int> layer_sizes() const;

  // Radius of the sphere around the origin enclosing all wire material.
  double bounding_radius() const;
};

// Throws GeometryError if any element or pairwise invariant is violated:
// positive dimensions, radius/length <= 0.05, unit orientations, canonical
// active-then-scatterer ordering, N_a >= 1, center distances > 2*wire_radius,
// and consistent layer annotations (layer 0 exactly the active elements).
void validate(const DsaGeometry& g);

// Parameters shared by the deterministic generators. Zero-valued optional
// fields are replaced by wavelength-derived defaults: length lambda/2, wire
// radius lambda/1000, stack spacing lambda/2.
struct RingDiskSpec {
  double ring_step = 0.0;  // radial step between rings, meters
  int rings = 0;           // number of scatterer rings L
  int stacks = 1;          // number of stacked disks along z
  int num_active = 1;
  double frequency = 0.0;  // hertz, sets the default dimensions
  double element_length = 0.0;
  double wire_radius = 0.0;
  double stack_step = 0.0;
};

// Concentric-ring disk (stacks = 1) or cylinder (stacks > 1) of z-oriented
// dipoles. Ring l has radius l*ring_step and round(2*pi*l*ring_step/d_arc)
// elements with d_arc = min(ring_step, lambda/4). A single active sits at
// the origin; several actives are spread on a circle of radius ring_step/2.
// Scatterers carry layer = ring index; actives layer = 0. For stacks > 1 the
// scatterer disks are replicated along z (centered on z = 0) while the
// active elements stay in the z = 0 plane.
DsaGeometry make_disk_geometry(const RingDiskSpec& spec);

// Uniform random scatterer deployment on a disk of the given radius in the
// z = 0 plane. Samples closer than 4*wire_radius to any accepted element are
// rejected and redrawn. Active placement matches make_disk_geometry. The
// result carries no layer annotations.
DsaGeometry make_random_disk_geometry(double disk_radius, int num_scatterers,
                                      const RingDiskSpec& base,
                                      std::uint64_t seed);

// Plain-text exchange format: comma-separated with the header
// kind,x,y,z,length,radius,ox,oy,oz[,layer]. The layer column is written
// only when the geometry is annotated and defaults to -1 when absent.
DsaGeometry load_geometry_csv(const std::string& path);
void save_geometry_csv(const DsaGeometry& g, const std::string& path);

}  // namespace dsa
