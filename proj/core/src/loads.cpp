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

#include "dsa/loads.hpp"

#include <cmath>

namespace dsa {

void validate(const VaractorParams& v) {
  if (!(v.r_v > 0.0 && v.l_1 > 0.0 && v.l_2 > 0.0 && v.c_min > 0.0 &&
        v.c_max > 0.0))
    throw ConfigError("varactor parameters must be positive");
  if (!(v.c_max > v.c_min))
    throw ConfigError("varactor c_max must exceed c_min");
}

double capacitance_of(double theta, const VaractorParams& v) {
  return v.c_min + (v.c_max - v.c_min) * (std::atan(theta) + kPi / 2.0) / kPi;
}

Cplx varactor_impedance(double f, double theta, const VaractorParams& v) {
  if (!(f > 0.0)) throw ConfigError("varactor impedance requires f > 0");
  const Cplx jw(0.0, 2.0 * kPi * f);
  const double c = capacitance_of(theta, v);
  const Cplx series = jw * v.l_2 + 1.0 / (jw * c) + v.r_v;
  return jw * v.l_1 * series / (jw * (v.l_1 + v.l_2) + 1.0 / (jw * c) + v.r_v);
}

Cplx varactor_impedance_derivative(double f, double theta,
                                   const VaractorParams& v) {
  if (!(f > 0.0)) throw ConfigError("varactor impedance requires f > 0");
  const double w = 2.0 * kPi * f;
  const Cplx jw(0.0, w);
  const double c = capacitance_of(theta, v);
  const double dc = (v.c_max - v.c_min) / (kPi * (1.0 + theta * theta));
  const Cplx u = 1.0 / (jw * c);
  const Cplx du = -u / c * dc;
  const Cplx a = jw * v.l_2 + v.r_v;
  const Cplx b = jw * (v.l_1 + v.l_2) + v.r_v;
  // z = jwL1 (a+u)/(b+u)  =>  dz/du = jwL1 (b-a)/(b+u)^2.
  const Cplx denom = b + u;
  return jw * v.l_1 * (b - a) / (denom * denom) * du;
}

LoadMatrices load_matrices(const LoadBank& bank, double f) {
  LoadMatrices out;
  out.scatterer.resize(bank.theta.size());
  for (Eigen::Index i = 0; i < bank.theta.size(); ++i)
    out.scatterer[i] = varactor_impedance(f, bank.theta[i], bank.varactor);
  out.active.resize(bank.phi.size());
  for (Eigen::Index i = 0; i < bank.phi.size(); ++i)
    out.active[i] = varactor_impedance(f, bank.phi[i], bank.varactor);
  return out;
}

}  // namespace dsa
