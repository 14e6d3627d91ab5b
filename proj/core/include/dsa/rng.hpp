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

namespace dsa {

// SplitMix64 generator. Small state, full 64-bit period, and cheap seeding
// make it suitable as both a stream generator and a seed splitter. All
// randomness in the library flows from one root seed through substream_seed,
// so results are reproducible regardless of evaluation order.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();

  // Uniform double in [0, 1), 53-bit resolution.
  double uniform01();

  double uniform(double lo, double hi);

  // Standard normal via Box-Muller. Uses two draws per call; the sine
  // partner is discarded so that call sequences stay position-independent.
  double normal();

 private:
  std::uint64_t state_;
};

// Derives the seed of an independent substream from a root seed and a
// counter tag. Used to give geometry sampling, optimizer initialization,
// per-trial perturbations, etc. their own streams.
std::uint64_t substream_seed(std::uint64_t root, std::uint64_t tag);

}  // namespace dsa
