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

#include "dsa/multiport.hpp"

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

namespace dsa {
namespace {

constexpr double kMaxCondition = 1e12;

std::string fmt_cond(double c) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << c;
  return os.str();
}

// Column-pivoted QR with a condition estimate from the triangular factor's
// diagonal ratio. Throws NetworkError instead of returning garbage.
class CondSolver {
 public:
  CondSolver(const CMat& m, const std::string& what) : qr_(m) {
    const int n = static_cast<int>(m.rows());
    double dmax = 0.0;
    double dmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const double d = std::abs(qr_.matrixR()(i, i));
      dmax = std::max(dmax, d);
      dmin = std::min(dmin, d);
    }
    cond_ = (dmin > 0.0) ? dmax / dmin
                         : std::numeric_limits<double>::infinity();
    if (!(cond_ < kMaxCondition))
      throw NetworkError(what + " is ill conditioned, estimate " +
                         fmt_cond(cond_));
  }

  double cond() const { return cond_; }

  CMat solve(const CMat& rhs) const { return qr_.solve(rhs); }

 private:
  Eigen::ColPivHouseholderQR<CMat> qr_;
  double cond_;
};

void check_scatterer_loads(const PartitionedImpedance& Z, const CVec& z_s) {
  if (static_cast<int>(z_s.size()) != Z.n_scatterer())
    throw NetworkError("load vector has " + std::to_string(z_s.size()) +
                       " entries for " + std::to_string(Z.n_scatterer()) +
                       " scatterers");
}

// (Z_ss + Z_S)^{-1} Z_sa, shared by the input impedance and both weight
// paths. Empty (0 x N_a) when there are no scatterers.
CMat scatter_response(const PartitionedImpedance& Z, const CVec& z_s,
                      double* cond_out) {
  check_scatterer_loads(Z, z_s);
  const int ns = Z.n_scatterer();
  if (ns == 0) {
    if (cond_out) *cond_out = 1.0;
    return CMat::Zero(0, Z.n_active);
  }
  CMat m = Z.zss();
  m.diagonal() += z_s;
  CondSolver s(m, "(Z_ss + Z_S)");
  if (cond_out) *cond_out = s.cond();
  return s.solve(Z.zsa());
}

// Symmetrize, eigendecompose, floor the spectrum, raise to the power p.
RMat spectral_power(const RMat& m, double p) {
  RMat sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<RMat> es(sym);
  if (es.info() != Eigen::Success)
    throw NetworkError("eigendecomposition of Re{Z_A} failed");
  RVec lam = es.eigenvalues();
  const double lmax = lam.maxCoeff();
  if (!(lmax > 0.0))
    throw PassivityError("Re{Z_A} has no positive eigenvalue");
  const double floor_val = 1e-12 * lmax;
  bool clamped = false;
  for (int i = 0; i < lam.size(); ++i) {
    if (lam[i] < -1e-6 * lmax)
      throw PassivityError("Re{Z_A} eigenvalue " + std::to_string(lam[i]) +
                           " below passivity tolerance");
    if (lam[i] < floor_val) {
      lam[i] = floor_val;
      clamped = true;
    }
  }
  if (clamped) {
    static std::atomic<bool> warned{false};
    if (!warned.exchange(true))
      std::cerr << "dsa: Re{Z_A} spectrum floored at 1e-12 * lambda_max "
                   "(near-singular radiation resistance)\n";
  }
  return es.eigenvectors() * lam.array().pow(p).matrix().asDiagonal() *
         es.eigenvectors().transpose();
}

}  // namespace

void MatchingMode::validate() const {
  if (!(R > 0.0)) throw NetworkError("RF-chain resistance must be positive");
}

RMat symmetric_sqrt(const RMat& m) { return spectral_power(m, 0.5); }

RMat symmetric_inverse_sqrt(const RMat& m) { return spectral_power(m, -0.5); }

CMat input_impedance(const PartitionedImpedance& Z, const CVec& z_s,
                     double* cond_out) {
  const CMat resp = scatter_response(Z, z_s, cond_out);
  if (Z.n_scatterer() == 0) return Z.zaa();
  return Z.zaa() - Z.zas() * resp;
}

EmWeights em_weights_perfect(const PartitionedImpedance& Z, const CVec& z_s,
                             double R) {
  MatchingMode mode{MatchingTag::perfect, R};
  mode.validate();
  const int na = Z.n_active;
  const int ns = Z.n_scatterer();
  const CMat resp = scatter_response(Z, z_s, nullptr);
  CMat z_a = Z.zaa();
  if (ns > 0) z_a -= Z.zas() * resp;
  const RMat root_inv = symmetric_inverse_sqrt(z_a.real());

  EmWeights out;
  out.mode = mode;
  out.f = Z.f;
  out.w.resize(na + ns, na);
  const Cplx pref = 1.0 / Cplx(0.0, 2.0 * std::sqrt(R));
  out.w.topRows(na) = pref * root_inv;
  if (ns > 0) out.w.bottomRows(ns) = -resp * out.w.topRows(na);
  return out;
}

EmWeights em_weights_simplified(const PartitionedImpedance& Z, const CVec& z_s,
                                const CVec& z_l, double R) {
  MatchingMode mode{MatchingTag::simplified, R};
  mode.validate();
  const int na = Z.n_active;
  const int ns = Z.n_scatterer();
  if (static_cast<int>(z_l.size()) != na)
    throw NetworkError("series load vector has " + std::to_string(z_l.size()) +
                       " entries for " + std::to_string(na) + " active ports");
  const CMat resp = scatter_response(Z, z_s, nullptr);
  CMat q = Z.zaa();
  if (ns > 0) q -= Z.zas() * resp;
  q.diagonal() += z_l;
  q.diagonal().array() += R;
  CondSolver qs(q, "Q = Z_A + Z_L + R I");

  EmWeights out;
  out.mode = mode;
  out.f = Z.f;
  out.w.resize(na + ns, na);
  out.w.topRows(na) = qs.solve(CMat::Identity(na, na));
  if (ns > 0) out.w.bottomRows(ns) = -resp * out.w.topRows(na);
  return out;
}

PowerReport power_report(const PartitionedImpedance& Z, const CVec& z_s,
                         const CVec& z_l, const EmWeights& W, const CVec& v_g,
                         double R) {
  const int na = Z.n_active;
  const int ns = Z.n_scatterer();
  check_scatterer_loads(Z, z_s);
  if (W.w.rows() != Z.n() || W.w.cols() != na)
    throw NetworkError("weight matrix shape does not match the network");
  if (static_cast<int>(v_g.size()) != na)
    throw NetworkError("excitation has " + std::to_string(v_g.size()) +
                       " entries for " + std::to_string(na) + " active ports");
  if (!(R > 0.0)) throw NetworkError("RF-chain resistance must be positive");

  const CVec i = W.w * v_g;
  const RVec ir = i.real();
  const RVec ii = i.imag();
  const RMat re = Z.z.real();
  const RMat im = Z.z.imag();

  PowerReport rep;
  rep.p_rad = ir.dot(re * ir) + ii.dot(re * ii);
  rep.p_react = ir.dot(im * ir) + ii.dot(im * ii);
  rep.p_tx = v_g.squaredNorm() / (4.0 * R);
  rep.p_d = (i.tail(ns).array().abs2() * z_s.real().array()).sum();
  if (W.mode.tag == MatchingTag::simplified) {
    if (static_cast<int>(z_l.size()) != na)
      throw NetworkError("series load vector has " + std::to_string(z_l.size()) +
                         " entries for " + std::to_string(na) +
                         " active ports");
    rep.p_d += (i.head(na).array().abs2() * z_l.real().array()).sum();
  }
  if (!(rep.p_rad > 0.0))
    throw DegenerateRadiatorError("non-positive radiated power " +
                                  std::to_string(rep.p_rad));
  rep.p_a = rep.p_rad + rep.p_d;
  rep.eta_m = rep.p_a / rep.p_tx;
  rep.eta_d = rep.p_rad / rep.p_a;
  rep.q = std::abs(rep.p_react) / rep.p_rad;
  return rep;
}

SimImpedance build_sim_impedance(const DsaGeometry& g, double f) {
  validate(g);
  if (!g.has_layers())
    throw GeometryError("layered impedance needs layer annotations");
  const int na = g.n_active();
  const int n = g.n();
  for (int i = na + 1; i < n; ++i)
    if (g.elements[static_cast<std::size_t>(i)].layer <
        g.elements[static_cast<std::size_t>(i - 1)].layer)
      throw GeometryError(
          "scatterers must be ordered by layer for the layered network");

  SimImpedance out;
  out.layer_sizes = g.layer_sizes();
  out.part.n_active = na;
  out.part.f = f;
  out.part.z = CMat::Zero(n, n);
  CMat& z = out.part.z;
  for (int i = 0; i < n; ++i)
    z(i, i) = dipole_self_impedance(g.elements[static_cast<std::size_t>(i)], f);

  int prev_start = 0;
  int prev_size = na;
  int start = na;
  for (int nl : out.layer_sizes) {
    for (int r = 0; r < nl; ++r)
      for (int c = 0; c < prev_size; ++c)
        z(start + r, prev_start + c) = dipole_mutual_impedance(
            g.elements[static_cast<std::size_t>(start + r)],
            g.elements[static_cast<std::size_t>(prev_start + c)], f);
    prev_start = start;
    prev_size = nl;
    start += nl;
  }
  return out;
}

CMat sim_em_weights(const SimImpedance& Z, const CVec& z_s, double R) {
  if (!(R > 0.0)) throw NetworkError("RF-chain resistance must be positive");
  check_scatterer_loads(Z.part, z_s);
  if (Z.layer_sizes.empty())
    throw NetworkError("layered network has no scatterer layers");
  int total = 0;
  for (int nl : Z.layer_sizes) total += nl;
  if (total != Z.part.n_scatterer())
    throw NetworkError("layer sizes do not sum to the scatterer count");

  const int na = Z.part.n_active;
  CMat w = CMat::Identity(na, na) / (2.0 * R);
  int prev_start = 0;
  int prev_size = na;
  int start = na;
  for (std::size_t l = 0; l < Z.layer_sizes.size(); ++l) {
    const int nl = Z.layer_sizes[l];
    CVec d = Z.part.z.diagonal().segment(start, nl) +
             z_s.segment(start - na, nl);
    double dmax = 0.0;
    double dmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nl; ++i) {
      const double a = std::abs(d[i]);
      dmax = std::max(dmax, a);
      dmin = std::min(dmin, a);
    }
    const double cond = (dmin > 0.0)
                            ? dmax / dmin
                            : std::numeric_limits<double>::infinity();
    if (!(cond < kMaxCondition))
      throw NetworkError("layer " + std::to_string(l + 1) +
                         " of the layered network is near singular, estimate " +
                         fmt_cond(cond));
    const CMat b = Z.part.z.block(start, prev_start, nl, prev_size);
    w = (-(d.cwiseInverse().asDiagonal() * (b * w).eval())).eval();
    prev_start = start;
    prev_size = nl;
    start += nl;
  }
  return w;
}

}  // namespace dsa
