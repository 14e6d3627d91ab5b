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

#include "dsa/optimizer.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "dsa/rng.hpp"

namespace dsa {
namespace {

constexpr double kMinRcond = 1e-12;

// Active-rows weight block per matching mode: Q^{-1} for the simplified
// network, (1/(j 2 sqrt(R))) Re{Z_A}^{-1/2} for the perfect one.
CMat weight_top_perfect(const CMat& z_a, double R) {
  const Cplx pref = 1.0 / Cplx(0.0, 2.0 * std::sqrt(R));
  return pref * symmetric_inverse_sqrt(z_a.real()).cast<Cplx>();
}

CMat inverse_guarded(const CMat& m, const char* what) {
  Eigen::PartialPivLU<CMat> lu(m);
  if (!(lu.rcond() > kMinRcond))
    throw NetworkError(std::string(what) + " is ill conditioned");
  return lu.inverse();
}

}  // namespace

void Scenario::validate() const {
  if (subcarriers.empty()) throw ConfigError("scenario has no subcarriers");
  if (n_active < 1) throw ConfigError("scenario needs an active element");
  if (n_scatterer < 0) throw ConfigError("negative scatterer count");
  if (!(R > 0.0)) throw ConfigError("RF-chain resistance must be positive");
  if (!(p_tx >= 0.0)) throw ConfigError("transmit power must be nonnegative");
  dsa::validate(varactor);
  for (const auto& p : subcarriers) {
    if (!(p.f > 0.0)) throw ConfigError("subcarrier frequency must be positive");
    int h_c_cols = 0;
    if (sim_path) {
      if (p.sim.layer_sizes.empty())
        throw ConfigError("layered scenario without layer sizes");
      if (p.sim.part.n() != n_active + n_scatterer ||
          p.sim.part.n_active != n_active)
        throw ConfigError("layered impedance dimensions mismatch");
      h_c_cols = p.sim.layer_sizes.back();
    } else {
      if (p.z.n() != n_active + n_scatterer || p.z.n_active != n_active)
        throw ConfigError("impedance dimensions mismatch");
      h_c_cols = n_active + n_scatterer;
    }
    if (p.h_c.cols() != h_c_cols)
      throw ConfigError("channel column count mismatch");
    if (p.h_opt.rows() != p.h_c.rows() || p.h_opt.cols() != n_active)
      throw ConfigError("target dimensions mismatch");
  }
}

void OptimizerConfig::validate() const {
  if (n_alt < 1) throw ConfigError("alternation count must be at least 1");
  if (n_i < 1) throw ConfigError("inner iteration count must be at least 1");
  if (!(fd_step > 0.0)) throw ConfigError("difference step must be positive");
  if (!(grad_tol >= 0.0)) throw ConfigError("gradient tolerance negative");
  if (!(stall_tol >= 0.0)) throw ConfigError("stall tolerance negative");
  if (!(armijo_c > 0.0) || !(armijo_c < 1.0))
    throw ConfigError("line-search parameter outside (0, 1)");
  if (max_backtracks < 1) throw ConfigError("backtrack budget must be >= 1");
}

// Per-subcarrier factorization snapshot used by the rank-one gradient paths.
struct SubCache {
  CVec z_s;
  CVec z_l;
  // general path
  CMat minv;      // (Z_ss + Z_S)^{-1}
  CMat g;         // minv Z_sa
  CMat zas_minv;  // Z_as minv
  CMat hcs_minv;  // H_cs minv
  CMat b;         // H_ca - H_cs g
  CMat z_a;
  CMat q_inv;     // simplified only
  CMat w_top;
  // layered path
  std::vector<CMat> prefix;  // P_0 = I/(2R), P_l = C_l ... C_1 P_0
  std::vector<CMat> suffix;  // suffix[l-1] = H_C C_L ... C_{l+1}
  std::vector<CVec> diag;    // per layer: A_l diagonal + Z_S slice
  // shared
  CMat m_raw;   // H_C W_EM
  CMat e_base;  // alpha m_raw W_D - H_opt
  double term = 0.0;
};

struct ObjectiveEvaluator::Impl {
  std::vector<SubCache> caches;
  bool valid = false;
  std::vector<int> coord_layer;  // scatterer coordinate -> 1-based layer
  std::vector<int> coord_local;  // -> row inside the layer block
};

ObjectiveEvaluator::ObjectiveEvaluator(const Scenario& sc,
                                       std::vector<double> alphas,
                                       std::vector<CMat> w_ds)
    : sc_(sc),
      alphas_(std::move(alphas)),
      w_ds_(std::move(w_ds)),
      impl_(new Impl) {
  sc_.validate();
  if (alphas_.size() != sc_.subcarriers.size() ||
      w_ds_.size() != sc_.subcarriers.size())
    throw ConfigError("one digital stage per subcarrier required");
  double scale = 1.0;
  for (const auto& p : sc_.subcarriers) scale += p.h_opt.squaredNorm();
  penalty_ = 1e12 * scale;
  for (const auto& w : w_ds_)
    if (w.rows() != sc_.n_active || w.cols() != sc_.n_active)
      throw ConfigError("digital precoder must be N_a x N_a");
  if (sc_.sim_path) {
    const auto& sizes = sc_.subcarriers.front().sim.layer_sizes;
    for (std::size_t l = 0; l < sizes.size(); ++l)
      for (int j = 0; j < sizes[l]; ++j) {
        impl_->coord_layer.push_back(static_cast<int>(l) + 1);
        impl_->coord_local.push_back(j);
      }
  }
  impl_->caches.resize(sc_.subcarriers.size());
}

ObjectiveEvaluator::~ObjectiveEvaluator() = default;

namespace {

double term_of(const CMat& e) { return e.squaredNorm(); }

// One subcarrier of the general path. Fills the cache when given one.
CMat eval_general(const Scenario& sc, const SubcarrierProblem& p,
                  const CVec& z_s, const CVec& z_l, SubCache* cache) {
  const int na = sc.n_active;
  const int ns = sc.n_scatterer;
  const auto h_ca = p.h_c.leftCols(na);
  const auto h_cs = p.h_c.rightCols(ns);

  CMat g(ns, na);
  CMat minv;
  if (ns > 0) {
    CMat m = p.z.zss();
    m.diagonal() += z_s;
    Eigen::PartialPivLU<CMat> lu(m);
    if (!(lu.rcond() > kMinRcond))
      throw NetworkError("(Z_ss + Z_S) is ill conditioned");
    if (cache) {
      minv = lu.inverse();
      g = minv * p.z.zsa();
    } else {
      g = lu.solve(p.z.zsa());
    }
  }
  CMat z_a = p.z.zaa();
  if (ns > 0) z_a -= p.z.zas() * g;

  CMat w_top;
  CMat q_inv;
  if (sc.matching == MatchingTag::simplified) {
    CMat q = z_a;
    q.diagonal() += z_l;
    q.diagonal().array() += sc.R;
    q_inv = inverse_guarded(q, "Q = Z_A + Z_L + R I");
    w_top = q_inv;
  } else {
    w_top = weight_top_perfect(z_a, sc.R);
  }
  CMat b = h_ca;
  if (ns > 0) b -= h_cs * g;
  CMat m_raw = b * w_top;

  if (cache) {
    cache->z_s = z_s;
    cache->z_l = z_l;
    cache->minv = std::move(minv);
    cache->g = std::move(g);
    cache->zas_minv = ns > 0 ? CMat(p.z.zas() * cache->minv) : CMat(na, 0);
    cache->hcs_minv =
        ns > 0 ? CMat(h_cs * cache->minv) : CMat(p.h_c.rows(), 0);
    cache->b = std::move(b);
    cache->z_a = std::move(z_a);
    cache->q_inv = std::move(q_inv);
    cache->w_top = w_top;
  }
  return m_raw;
}

// One subcarrier of the layered path.
CMat eval_sim(const Scenario& sc, const SubcarrierProblem& p, const CVec& z_s,
              SubCache* cache) {
  const int na = sc.n_active;
  const auto& sizes = p.sim.layer_sizes;
  const CMat& z = p.sim.part.z;

  CMat w = CMat::Identity(na, na) / (2.0 * sc.R);
  if (cache) {
    cache->z_s = z_s;
    cache->prefix.assign(1, w);
    cache->diag.clear();
  }
  int prev_start = 0;
  int prev_size = na;
  int start = na;
  for (std::size_t l = 0; l < sizes.size(); ++l) {
    const int nl = sizes[l];
    CVec d = z.diagonal().segment(start, nl) + z_s.segment(start - na, nl);
    double dmax = 0.0;
    double dmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nl; ++i) {
      const double a = std::abs(d[i]);
      dmax = std::max(dmax, a);
      dmin = std::min(dmin, a);
    }
    if (!(dmin > 0.0) || dmax / dmin > 1e12)
      throw NetworkError("layer " + std::to_string(l + 1) +
                         " of the layered network is near singular");
    w = (-(d.cwiseInverse().asDiagonal() *
           (z.block(start, prev_start, nl, prev_size) * w)))
            .eval();
    if (cache) {
      cache->prefix.push_back(w);
      cache->diag.push_back(std::move(d));
    }
    prev_start = start;
    prev_size = nl;
    start += nl;
  }
  if (cache) {
    // suffix[l-1] = H_C C_L ... C_{l+1}; built backward from H_C.
    cache->suffix.assign(sizes.size(), CMat());
    CMat s = p.h_c;
    for (std::size_t l = sizes.size(); l-- > 0;) {
      cache->suffix[l] = s;
      if (l > 0) {
        const int nl = sizes[l];
        int st = na;
        for (std::size_t q = 0; q < l; ++q) st += sizes[q];
        const int prev = sizes[l - 1];
        int pst = st - prev;
        s = -((s * cache->diag[l].cwiseInverse().asDiagonal()) *
              z.block(st, pst, nl, prev));
      }
    }
  }
  return p.h_c * w;
}

}  // namespace

double ObjectiveEvaluator::value(const RVec& psi) const {
  if (psi.size() != sc_.psi_dim())
    throw ConfigError("parameter vector has the wrong dimension");
  const int ns = sc_.n_scatterer;
  double total = 0.0;
  try {
    for (std::size_t k = 0; k < sc_.subcarriers.size(); ++k) {
      const auto& p = sc_.subcarriers[k];
      CVec z_s(ns);
      for (int n = 0; n < ns; ++n)
        z_s[n] = varactor_impedance(p.f, psi[n], sc_.varactor);
      CVec z_l(0);
      if (!sc_.sim_path && sc_.matching == MatchingTag::simplified) {
        z_l.resize(sc_.n_active);
        for (int m = 0; m < sc_.n_active; ++m)
          z_l[m] = varactor_impedance(p.f, psi[ns + m], sc_.varactor);
      }
      const CMat m_raw = sc_.sim_path
                             ? eval_sim(sc_, p, z_s, nullptr)
                             : eval_general(sc_, p, z_s, z_l, nullptr);
      total += term_of(alphas_[k] * (m_raw * w_ds_[k]) - p.h_opt);
    }
  } catch (const NetworkError&) {
    return penalty_;
  } catch (const PassivityError&) {
    return penalty_;
  }
  return total;
}

double ObjectiveEvaluator::value_cached(const RVec& psi) {
  if (psi.size() != sc_.psi_dim())
    throw ConfigError("parameter vector has the wrong dimension");
  const int ns = sc_.n_scatterer;
  impl_->valid = false;
  double total = 0.0;
  try {
    for (std::size_t k = 0; k < sc_.subcarriers.size(); ++k) {
      const auto& p = sc_.subcarriers[k];
      SubCache& c = impl_->caches[k];
      CVec z_s(ns);
      for (int n = 0; n < ns; ++n)
        z_s[n] = varactor_impedance(p.f, psi[n], sc_.varactor);
      CVec z_l(0);
      if (!sc_.sim_path && sc_.matching == MatchingTag::simplified) {
        z_l.resize(sc_.n_active);
        for (int m = 0; m < sc_.n_active; ++m)
          z_l[m] = varactor_impedance(p.f, psi[ns + m], sc_.varactor);
      }
      c.m_raw = sc_.sim_path ? eval_sim(sc_, p, z_s, &c)
                             : eval_general(sc_, p, z_s, z_l, &c);
      c.e_base = alphas_[k] * (c.m_raw * w_ds_[k]) - p.h_opt;
      c.term = term_of(c.e_base);
      total += c.term;
    }
  } catch (const NetworkError&) {
    return penalty_;
  } catch (const PassivityError&) {
    return penalty_;
  }
  impl_->valid = true;
  return total;
}

namespace {

struct PenaltySignal {};

// Objective after adding step to coordinate n, via rank-one updates of the
// cached factorizations. Throws PenaltySignal on a near-singular update.
double perturbed_total(const Scenario& sc, const ObjectiveEvaluator::Impl& im,
                       const std::vector<double>& alphas,
                       const std::vector<CMat>& w_ds, const RVec& psi, int n,
                       double step) {
  const int ns = sc.n_scatterer;
  double total = 0.0;
  for (std::size_t k = 0; k < sc.subcarriers.size(); ++k) {
    const auto& p = sc.subcarriers[k];
    const SubCache& c = im.caches[k];
    const Cplx z_new = varactor_impedance(
        p.f, psi[n] + step, sc.varactor);

    if (sc.sim_path) {
      const int layer = im.coord_layer[static_cast<std::size_t>(n)];
      const int local = im.coord_local[static_cast<std::size_t>(n)];
      const Cplx d_old = c.diag[static_cast<std::size_t>(layer - 1)][local];
      const Cplx d_new = d_old - c.z_s[n] + z_new;
      if (std::abs(d_new) < 1e-12 * std::abs(d_old)) throw PenaltySignal{};
      const Cplx ratio = d_old / d_new - 1.0;
      const CMat e =
          c.e_base +
          alphas[k] * ratio *
              (c.suffix[static_cast<std::size_t>(layer - 1)].col(local) *
               (c.prefix[static_cast<std::size_t>(layer)].row(local) *
                w_ds[k]));
      total += term_of(e);
      continue;
    }

    CMat w_top_p;
    CMat b_p = c.b;
    if (n < ns) {
      const Cplx delta = z_new - c.z_s[n];
      const Cplx den1 = 1.0 + delta * c.minv(n, n);
      if (std::abs(den1) < 1e-12) throw PenaltySignal{};
      const Cplx cf = delta / den1;
      if (sc.matching == MatchingTag::simplified) {
        const CVec at = c.q_inv * c.zas_minv.col(n);
        const Eigen::RowVectorXcd ga = c.g.row(n) * c.q_inv;
        const Cplx den2 = 1.0 + cf * (c.g.row(n) * at).value();
        if (std::abs(den2) < 1e-12) throw PenaltySignal{};
        w_top_p = c.q_inv - (cf / den2) * (at * ga);
      } else {
        const CMat z_a_p =
            c.z_a + cf * (c.zas_minv.col(n) * c.g.row(n));
        w_top_p = weight_top_perfect(z_a_p, sc.R);
      }
      b_p += cf * (c.hcs_minv.col(n) * c.g.row(n));
    } else {
      const int m = n - ns;
      const Cplx delta = z_new - c.z_l[m];
      const Cplx den = 1.0 + delta * c.q_inv(m, m);
      if (std::abs(den) < 1e-12) throw PenaltySignal{};
      w_top_p = c.q_inv -
                (delta / den) * (c.q_inv.col(m) * c.q_inv.row(m));
    }
    const CMat e = alphas[k] * ((b_p * w_top_p) * w_ds[k]) - p.h_opt;
    total += term_of(e);
  }
  return total;
}

}  // namespace

RVec ObjectiveEvaluator::gradient(const RVec& psi, double base,
                                  double fd_step) const {
  RVec grad(psi.size());
  if (!impl_->valid || base >= penalty_) {
    // No usable factorization (penalty region): fall back to full solves.
    RVec probe = psi;
    for (int n = 0; n < psi.size(); ++n) {
      const double h = fd_step * (1.0 + std::abs(psi[n]));
      probe[n] = psi[n] + h;
      grad[n] = (value(probe) - base) / h;
      probe[n] = psi[n];
    }
    return grad;
  }
  for (int n = 0; n < psi.size(); ++n) {
    const double h = fd_step * (1.0 + std::abs(psi[n]));
    double f_plus;
    try {
      f_plus = perturbed_total(sc_, *impl_, alphas_, w_ds_, psi, n, h);
    } catch (const PenaltySignal&) {
      f_plus = penalty_;
    } catch (const PassivityError&) {
      f_plus = penalty_;
    }
    grad[n] = (f_plus - base) / h;
  }
  return grad;
}

RVec ObjectiveEvaluator::gradient_second_order(const RVec& psi, double base,
                                               double fd_step) const {
  RVec grad(psi.size());
  if (!impl_->valid || base >= penalty_) {
    RVec probe = psi;
    for (int n = 0; n < psi.size(); ++n) {
      const double h = fd_step * (1.0 + std::abs(psi[n]));
      probe[n] = psi[n] + h;
      const double f1 = value(probe);
      probe[n] = psi[n] + 2.0 * h;
      const double f2 = value(probe);
      probe[n] = psi[n];
      grad[n] = (-3.0 * base + 4.0 * f1 - f2) / (2.0 * h);
    }
    return grad;
  }
  for (int n = 0; n < psi.size(); ++n) {
    const double h = fd_step * (1.0 + std::abs(psi[n]));
    double f1, f2;
    try {
      f1 = perturbed_total(sc_, *impl_, alphas_, w_ds_, psi, n, h);
      f2 = perturbed_total(sc_, *impl_, alphas_, w_ds_, psi, n, 2.0 * h);
    } catch (const PenaltySignal&) {
      f1 = f2 = penalty_;
    } catch (const PassivityError&) {
      f1 = f2 = penalty_;
    }
    grad[n] = (-3.0 * base + 4.0 * f1 - f2) / (2.0 * h);
  }
  return grad;
}

std::vector<CMat> ObjectiveEvaluator::transfer_matrices(
    const RVec& psi) const {
  if (psi.size() != sc_.psi_dim())
    throw ConfigError("parameter vector has the wrong dimension");
  const int ns = sc_.n_scatterer;
  std::vector<CMat> out;
  out.reserve(sc_.subcarriers.size());
  for (const auto& p : sc_.subcarriers) {
    CVec z_s(ns);
    for (int n = 0; n < ns; ++n)
      z_s[n] = varactor_impedance(p.f, psi[n], sc_.varactor);
    CVec z_l(0);
    if (!sc_.sim_path && sc_.matching == MatchingTag::simplified) {
      z_l.resize(sc_.n_active);
      for (int m = 0; m < sc_.n_active; ++m)
        z_l[m] = varactor_impedance(p.f, psi[ns + m], sc_.varactor);
    }
    out.push_back(sc_.sim_path ? eval_sim(sc_, p, z_s, nullptr)
                               : eval_general(sc_, p, z_s, z_l, nullptr));
  }
  return out;
}

double objective_value(const RVec& psi, const std::vector<double>& alphas,
                       const std::vector<CMat>& w_ds, const Scenario& sc) {
  ObjectiveEvaluator ev(sc, alphas, w_ds);
  return ev.value(psi);
}

DigitalStep closed_form_digital_step(const CMat& m, const CMat& h_opt,
                                     double R, int n_a) {
  if (!(R > 0.0)) throw ConfigError("RF-chain resistance must be positive");
  if (m.cols() != n_a) throw ConfigError("transfer matrix must have N_a columns");
  if (h_opt.rows() != m.rows())
    throw ConfigError("target row count does not match the transfer matrix");
  Eigen::CompleteOrthogonalDecomposition<CMat> cod(m);
  const CMat p = cod.solve(h_opt);
  const double norm = p.norm();
  DigitalStep step;
  if (norm == 0.0) {
    step.alpha = 0.0;
    step.w_d = 2.0 * std::sqrt(R) * CMat::Identity(n_a, n_a);
    step.degenerate = true;
    return step;
  }
  step.alpha = norm / std::sqrt(4.0 * R * n_a);
  step.w_d = p / step.alpha;
  return step;
}

InnerResult minimize_psi(const RVec& psi0, const std::vector<double>& alphas,
                         const std::vector<CMat>& w_ds, const Scenario& sc,
                         const OptimizerConfig& cfg, int alternation) {
  cfg.validate();
  if (psi0.size() != sc.psi_dim())
    throw ConfigError("initial point has the wrong dimension");

  ObjectiveEvaluator ev(sc, alphas, w_ds);
  const int n = static_cast<int>(psi0.size());
  InnerResult res;
  res.psi = psi0;

  double f = ev.value_cached(res.psi);
  if (!std::isfinite(f))
    throw DsaError("objective not finite at the initial point");
  RVec g = ev.gradient(res.psi, f, cfg.fd_step);

  RMat h_inv = RMat::Identity(n, n);
  bool scaled = false;

  auto line_search = [&](const RVec& p, double gp, double& t_out,
                         double& f_out) {
    double t = 1.0;
    for (int b = 0; b < cfg.max_backtracks; ++b) {
      const double f_try = ev.value(res.psi + t * p);
      if (f_try <= f + cfg.armijo_c * t * gp) {
        t_out = t;
        f_out = f_try;
        return true;
      }
      t *= 0.5;
    }
    return false;
  };

  for (int it = 1; it <= cfg.n_i; ++it) {
    res.trace.push_back({alternation, it, f});
    res.iterations = it;
    if (g.norm() <= cfg.grad_tol) {
      res.converged = true;
      break;
    }

    RVec p = -(h_inv * g);
    double gp = g.dot(p);
    if (!(gp < 0.0)) {
      h_inv.setIdentity();
      p = -g;
      gp = -g.squaredNorm();
    }

    double t = 0.0, f_new = 0.0;
    bool accepted = line_search(p, gp, t, f_new);
    if (!accepted) {
      // Recovery: higher-order gradient estimate, fresh curvature, one retry.
      g = ev.gradient_second_order(res.psi, f, cfg.fd_step);
      h_inv.setIdentity();
      scaled = false;
      p = -g;
      gp = -g.squaredNorm();
      accepted = line_search(p, gp, t, f_new);
      if (!accepted) break;
    }

    const RVec s = t * p;
    res.psi += s;
    const double f_cached = ev.value_cached(res.psi);
    const RVec g_new = ev.gradient(res.psi, f_cached, cfg.fd_step);
    const RVec y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (!scaled) {
        h_inv = (sy / y.squaredNorm()) * RMat::Identity(n, n);
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const RVec hy = h_inv * y;
      // BFGS inverse update: H += rho((1 + rho y'Hy) s s' - s (Hy)' - Hy s')
      const double yhy = y.dot(hy);
      h_inv.noalias() += rho * ((1.0 + rho * yhy) * (s * s.transpose()) -
                                s * hy.transpose() - hy * s.transpose());
    }
    f = f_cached;
    g = g_new;
  }
  res.objective = f;
  return res;
}

PowerReport expected_power_report(const PartitionedImpedance& z,
                                  const CVec& z_s, const CVec& z_l,
                                  const EmWeights& w, const CMat& w_d,
                                  double p_tx) {
  const int na = z.n_active;
  if (w_d.rows() != na || w_d.cols() != na)
    throw ConfigError("digital precoder must be N_a x N_a");
  const double per_stream = p_tx / na;
  PowerReport total;
  for (int n = 0; n < na; ++n) {
    const CVec v_g = std::sqrt(per_stream) * w_d.col(n);
    const PowerReport r = power_report(z, z_s, z_l, w, v_g, w.mode.R);
    total.p_tx += r.p_tx;
    total.p_a += r.p_a;
    total.p_rad += r.p_rad;
    total.p_react += r.p_react;
    total.p_d += r.p_d;
  }
  total.eta_m = total.p_a / total.p_tx;
  total.eta_d = total.p_rad / total.p_a;
  total.q = std::abs(total.p_react) / total.p_rad;
  return total;
}

OptimizationResult alternate_optimize(const Scenario& sc,
                                      const OptimizerConfig& cfg) {
  sc.validate();
  cfg.validate();
  const int dim = sc.psi_dim();
  const int na = sc.n_active;
  const std::size_t K = sc.subcarriers.size();

  RVec psi = RVec::Zero(dim);
  switch (cfg.init) {
    case OptimizerConfig::Init::random: {
      SplitMix64 rng(cfg.seed);
      for (int i = 0; i < sc.n_scatterer; ++i) psi[i] = rng.uniform(-5.0, 5.0);
      break;
    }
    case OptimizerConfig::Init::given:
      if (cfg.psi0.size() != dim)
        throw ConfigError("given initial point has the wrong dimension");
      psi = cfg.psi0;
      break;
    case OptimizerConfig::Init::zero:
      break;
  }

  OptimizationResult out;
  out.alpha_hat.assign(K, 1.0);
  out.w_d_hat.assign(K, 2.0 * std::sqrt(sc.R) * CMat::Identity(na, na));

  if (!sc.digital_precoder) {
    InnerResult inner =
        minimize_psi(psi, out.alpha_hat, out.w_d_hat, sc, cfg, 1);
    psi = inner.psi;
    out.trace = std::move(inner.trace);
    out.converged = inner.converged;
    out.objective = inner.objective;
  } else {
    double f_prev = 0.0;
    for (int a = 1; a <= cfg.n_alt; ++a) {
      ObjectiveEvaluator ev(sc, out.alpha_hat, out.w_d_hat);
      const std::vector<CMat> ms = ev.transfer_matrices(psi);
      for (std::size_t k = 0; k < K; ++k) {
        const DigitalStep step = closed_form_digital_step(
            ms[k], sc.subcarriers[k].h_opt, sc.R, na);
        out.alpha_hat[k] = step.alpha;
        out.w_d_hat[k] = step.w_d;
      }
      InnerResult inner =
          minimize_psi(psi, out.alpha_hat, out.w_d_hat, sc, cfg, a);
      psi = inner.psi;
      out.trace.insert(out.trace.end(), inner.trace.begin(),
                       inner.trace.end());
      out.objective = inner.objective;
      if (a > 1 && std::abs(f_prev - inner.objective) <=
                       cfg.stall_tol * std::max(1.0, std::abs(f_prev))) {
        out.converged = true;
        break;
      }
      f_prev = inner.objective;
    }
  }
  out.psi_hat = psi;

  if (!sc.sim_path) {
    const int ns = sc.n_scatterer;
    for (std::size_t k = 0; k < K; ++k) {
      const auto& p = sc.subcarriers[k];
      CVec z_s(ns);
      for (int n = 0; n < ns; ++n)
        z_s[n] = varactor_impedance(p.f, psi[n], sc.varactor);
      EmWeights w;
      CVec z_l(0);
      if (sc.matching == MatchingTag::simplified) {
        z_l.resize(na);
        for (int m = 0; m < na; ++m)
          z_l[m] = varactor_impedance(p.f, psi[ns + m], sc.varactor);
        w = em_weights_simplified(p.z, z_s, z_l, sc.R);
      } else {
        w = em_weights_perfect(p.z, z_s, sc.R);
      }
      out.power.push_back(
          expected_power_report(p.z, z_s, z_l, w, out.w_d_hat[k], sc.p_tx));
    }
  }
  return out;
}

}  // namespace dsa
