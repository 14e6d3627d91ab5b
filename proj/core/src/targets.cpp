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

#include "dsa/targets.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "dsa/rng.hpp"

namespace dsa {
namespace {

// Thin SVD plus the relative-rank check shared by the ZF and SVD targets.
struct ThinSvd {
  CMat u;
  RVec s;
  CMat v;
  int numerical_rank = 0;
};

ThinSvd thin_svd(const CMat& m) {
  Eigen::BDCSVD<CMat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  ThinSvd out{svd.matrixU(), svd.singularValues(), svd.matrixV(), 0};
  const double smax = out.s.size() > 0 ? out.s[0] : 0.0;
  for (int i = 0; i < out.s.size(); ++i)
    if (out.s[i] > 1e-10 * smax) ++out.numerical_rank;
  return out;
}

}  // namespace

TargetSpec beam_target(int T, const std::vector<std::vector<int>>& steer,
                       double p_rx) {
  if (T < 1) throw ConfigError("beam target needs at least one test point");
  if (!(p_rx >= 0.0)) throw ConfigError("receive power must be nonnegative");
  if (steer.empty()) throw ConfigError("beam target needs steering indices");
  const std::size_t n_inputs = steer.front().size();
  if (n_inputs == 0)
    throw ConfigError("beam target needs one steering index per input");

  TargetSpec spec;
  spec.kind = TargetKind::beam;
  spec.steer = steer;
  spec.p_rx = p_rx;
  const double amp = std::sqrt(p_rx);
  for (const auto& indices : steer) {
    if (indices.size() != n_inputs)
      throw ConfigError("steering index count differs across subcarriers");
    CMat h = CMat::Zero(T, static_cast<int>(n_inputs));
    for (std::size_t n = 0; n < n_inputs; ++n) {
      const int t = indices[n];
      if (t < 1 || t > T)
        throw ConfigError("steering index " + std::to_string(t) +
                          " outside 1.." + std::to_string(T));
      h(t - 1, static_cast<int>(n)) = amp;
    }
    spec.h_opt.push_back(std::move(h));
  }
  return spec;
}

TargetSpec zf_target(const std::vector<Transimpedance>& h_c) {
  if (h_c.empty()) throw ConfigError("zero-forcing target needs a channel");
  TargetSpec spec;
  spec.kind = TargetKind::zero_forcing;
  for (const auto& hc : h_c) {
    const int T = static_cast<int>(hc.h.rows());
    const ThinSvd svd = thin_svd(hc.h);
    if (svd.numerical_rank < T)
      throw NetworkError("zero-forcing target needs full row rank: rank " +
                         std::to_string(svd.numerical_rank) + " of " +
                         std::to_string(T));
    CMat pinv = svd.v.leftCols(svd.numerical_rank) *
                svd.s.head(svd.numerical_rank)
                    .cwiseInverse()
                    .cast<Cplx>()
                    .asDiagonal() *
                svd.u.leftCols(svd.numerical_rank).adjoint();
    spec.h_opt.push_back(hc.h * pinv);
  }
  return spec;
}

TargetSpec svd_target(const std::vector<Transimpedance>& h_c, int r) {
  if (h_c.empty()) throw ConfigError("precoder target needs a channel");
  if (r < 1) throw ConfigError("retained rank must be at least 1");
  TargetSpec spec;
  spec.kind = TargetKind::svd_precoder;
  spec.rank = r;
  for (const auto& hc : h_c) {
    if (r > std::min(hc.h.rows(), hc.h.cols()))
      throw ConfigError("retained rank exceeds the channel dimensions");
    const ThinSvd svd = thin_svd(hc.h);
    if (svd.numerical_rank < r)
      throw NetworkError("channel numerical rank " +
                         std::to_string(svd.numerical_rank) +
                         " is below the retained rank " + std::to_string(r));
    spec.combiner.push_back(svd.u.leftCols(r));
    spec.gains.push_back(svd.s.head(r));
    spec.h_opt.push_back(svd.u.leftCols(r) *
                         svd.s.head(r).cast<Cplx>().asDiagonal());
  }
  return spec;
}

SphereGrid make_sphere_grid(double step_deg) {
  if (!(step_deg > 0.0) || step_deg > 90.0)
    throw ConfigError("grid step must be in (0, 90] degrees");
  SphereGrid grid;
  grid.n_theta = static_cast<int>(std::lround(180.0 / step_deg));
  grid.n_phi = static_cast<int>(std::lround(360.0 / step_deg));
  const double dt = kPi / grid.n_theta;
  const double dp = 2.0 * kPi / grid.n_phi;
  grid.directions.reserve(
      static_cast<std::size_t>(grid.n_theta) * grid.n_phi);
  grid.weights.resize(static_cast<Eigen::Index>(grid.n_theta) * grid.n_phi);
  Eigen::Index idx = 0;
  for (int it = 0; it < grid.n_theta; ++it) {
    const double theta = (it + 0.5) * dt;
    const double st = std::sin(theta);
    const double ct = std::cos(theta);
    for (int ip = 0; ip < grid.n_phi; ++ip) {
      const double phi = ip * dp;
      grid.directions.emplace_back(st * std::cos(phi), st * std::sin(phi),
                                   ct);
      grid.weights[idx++] = st * dt * dp;
    }
  }
  return grid;
}

std::vector<Vec3> azimuth_cut_directions(double step_deg) {
  if (!(step_deg > 0.0) || step_deg > 180.0)
    throw ConfigError("grid step must be in (0, 180] degrees");
  const int n = static_cast<int>(std::lround(360.0 / step_deg));
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double phi = 2.0 * kPi * j / n;
    out.emplace_back(std::cos(phi), std::sin(phi), 0.0);
  }
  return out;
}

RVec radiation_intensity(const CVec& i, const DsaGeometry& g, double f,
                         const std::vector<Vec3>& directions) {
  if (static_cast<int>(i.size()) != g.n())
    throw DegenerateRadiatorError("current vector length does not match the "
                                  "element count");
  if (i.norm() == 0.0) throw DegenerateRadiatorError("zero current vector");
  if (!(f > 0.0)) throw ConfigError("frequency must be positive");
  const double lambda = wavelength(f);
  const double k = wavenumber(f);
  const double scale = kFreeSpaceImpedance / (4.0 * lambda * lambda);

  RVec u(static_cast<Eigen::Index>(directions.size()));
  for (std::size_t d = 0; d < directions.size(); ++d) {
    const Vec3& dir = directions[d];
    Cplx field = 0.0;
    for (int n = 0; n < g.n(); ++n) {
      const auto& e = g.elements[static_cast<std::size_t>(n)];
      const double le =
          dipole_effective_length(e.orientation.dot(dir), lambda);
      const double phase = k * dir.dot(e.position);
      field += le * i[n] * std::exp(Cplx(0.0, phase));
    }
    u[static_cast<Eigen::Index>(d)] = scale * std::norm(field);
  }
  return u;
}

double integrate_over_sphere(const SphereGrid& grid, const RVec& u) {
  if (u.size() != grid.weights.size())
    throw ConfigError("intensity samples do not match the grid");
  return grid.weights.dot(u);
}

RVec directivity_values(const RVec& u, double p_rad) {
  if (!(p_rad > 0.0))
    throw DegenerateRadiatorError("non-positive radiated power " +
                                  std::to_string(p_rad));
  return 4.0 * kPi / p_rad * u;
}

void save_pattern_csv(const std::string& path,
                      const std::vector<Vec3>& directions, const RVec& d) {
  if (static_cast<Eigen::Index>(directions.size()) != d.size())
    throw IoError("pattern export: directions and values differ in length");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "azimuth_deg,elevation_deg,directivity_db\n";
  out << std::setprecision(10);
  for (std::size_t j = 0; j < directions.size(); ++j) {
    const Vec3& dir = directions[j];
    double az = std::atan2(dir.y(), dir.x()) * 180.0 / kPi;
    if (az < 0.0) az += 360.0;
    const double el = 90.0 - std::acos(std::clamp(dir.z(), -1.0, 1.0)) *
                                 180.0 / kPi;
    out << az << ',' << el << ',' << db10(d[static_cast<Eigen::Index>(j)])
        << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

double sum_spectral_efficiency(const CMat& h, double sigma2, double p_tx) {
  if (h.rows() != h.cols())
    throw ConfigError("spectral efficiency needs a square end-to-end channel");
  if (!(sigma2 >= 0.0)) throw ConfigError("noise power must be nonnegative");
  if (!(p_tx >= 0.0)) throw ConfigError("transmit power must be nonnegative");
  const int T = static_cast<int>(h.rows());
  const double per_stream = p_tx / T;
  double se = 0.0;
  for (int t = 0; t < T; ++t) {
    const double sig = std::norm(h(t, t)) * per_stream;
    double interf = 0.0;
    for (int j = 0; j < T; ++j)
      if (j != t) interf += std::norm(h(t, j)) * per_stream;
    const double denom = interf + sigma2;
    if (denom <= 0.0) {
      if (sig > 0.0)
        throw ConfigError(
            "zero noise with an interference-free row gives unbounded "
            "spectral efficiency");
      continue;
    }
    se += std::log2(1.0 + sig / denom);
  }
  return se;
}

RMat diagonalization_report(const CMat& u, const CMat& h) {
  if (u.rows() != h.rows())
    throw ConfigError("combiner and channel row counts differ");
  const CMat prod = u.adjoint() * h;
  RMat out(prod.rows(), prod.cols());
  for (Eigen::Index r = 0; r < prod.rows(); ++r)
    for (Eigen::Index c = 0; c < prod.cols(); ++c)
      out(r, c) = db20(std::abs(prod(r, c)));
  return out;
}

SensitivityResult sensitivity_analysis(const RVec& psi_star, int n_perturb,
                                       double sigma_rel, int trials,
                                       std::uint64_t seed,
                                       const MetricEvaluator& evaluate) {
  if (trials < 1) throw ConfigError("sensitivity needs at least one trial");
  if (!(sigma_rel >= 0.0))
    throw ConfigError("relative error deviation must be nonnegative");
  if (n_perturb < 0 || n_perturb > psi_star.size())
    throw ConfigError("perturbed-coordinate count outside the vector");

  SensitivityResult res;
  res.metric.resize(trials);
  res.eta_m.resize(trials);
  for (int t = 0; t < trials; ++t) {
    SplitMix64 rng(substream_seed(seed, static_cast<std::uint64_t>(t)));
    RVec psi = psi_star;
    for (int n = 0; n < n_perturb; ++n)
      psi[n] += rng.normal() * sigma_rel * std::abs(psi_star[n]);
    const auto [metric, eta_m] = evaluate(psi);
    res.metric[t] = metric;
    res.eta_m[t] = eta_m;
  }
  res.mean = res.metric.mean();
  res.stdev = trials > 1
                  ? std::sqrt((res.metric.array() - res.mean).square().sum() /
                              (trials - 1))
                  : 0.0;
  return res;
}

}  // namespace dsa
