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
#include <memory>
#include <vector>

#include "dsa/loads.hpp"
#include "dsa/multiport.hpp"
#include "dsa/types.hpp"

namespace dsa {

// One frequency's precomputed problem data. The general path uses z and the
// full T x N channel h_c; the layered (sim) path uses sim and a T x N_L
// channel holding only the last-layer columns.
struct SubcarrierProblem {
  double f = 0.0;
  PartitionedImpedance z;
  SimImpedance sim;
  CMat h_c;
  CMat h_opt;  // T x N_a desired end-to-end response
};

// Everything the objective needs, frozen before optimization starts. psi
// stacks the scatterer parameters theta first; with the simplified matching
// network the per-active load parameters phi follow (the layered path keeps
// its ports matched and has no phi).
struct Scenario {
  std::vector<SubcarrierProblem> subcarriers;
  MatchingTag matching = MatchingTag::simplified;
  bool sim_path = false;
  bool digital_precoder = true;
  double R = 50.0;
  double p_tx = 1.0;  // watts, for the reported power expectations
  VaractorParams varactor;
  int n_active = 0;
  int n_scatterer = 0;

  int psi_dim() const {
    const bool with_phi = matching == MatchingTag::simplified && !sim_path;
    return n_scatterer + (with_phi ? n_active : 0);
  }
  void validate() const;
};

struct OptimizerConfig {
  int n_alt = 1;
  int n_i = 1500;
  enum class Init { random, given, zero };
  Init init = Init::random;
  RVec psi0;  // used when init == given
  std::uint64_t seed = 1;
  double fd_step = 1e-6;    // relative forward-difference step
  double grad_tol = 1e-10;  // gradient-norm stop
  double stall_tol = 1e-8;  // relative objective change across alternations
  double armijo_c = 1e-4;
  int max_backtracks = 30;

  void validate() const;
};

struct TraceRow {
  int alternation = 0;
  int inner = 0;
  double objective = 0.0;
};

struct OptimizationResult {
  RVec psi_hat;
  std::vector<double> alpha_hat;  // per subcarrier
  std::vector<CMat> w_d_hat;      // per subcarrier, N_a x N_a
  std::vector<TraceRow> trace;
  bool converged = false;
  double objective = 0.0;
  std::vector<PowerReport> power;  // per subcarrier; empty on the sim path
};

// Frobenius objective sum_k || alpha_k H_C(f_k) W_EM(f_k) W_D,k - H_opt,k
// ||_F^2 with factorization caching for the coordinate-perturbation pattern
// of finite-difference gradients. Network failures at an evaluation point
// yield a large finite penalty instead of an exception so line searches
// survive superdirective regions.
class ObjectiveEvaluator {
 public:
  struct Impl;

  ObjectiveEvaluator(const Scenario& sc, std::vector<double> alphas,
                     std::vector<CMat> w_ds);
  ~ObjectiveEvaluator();
  ObjectiveEvaluator(const ObjectiveEvaluator&) = delete;
  ObjectiveEvaluator& operator=(const ObjectiveEvaluator&) = delete;

  // Plain evaluation, no state change.
  double value(const RVec& psi) const;

  // Evaluation that refreshes the internal per-subcarrier factorizations;
  // call before gradient().
  double value_cached(const RVec& psi);

  // Forward-difference gradient with step fd_step * (1 + |psi_n|), reusing
  // the cached factorizations with rank-one updates. base must equal the
  // last value_cached result.
  RVec gradient(const RVec& psi, double base, double fd_step) const;

  // Three-point forward-difference gradient (second order), same caching;
  // used by the stall-recovery path.
  RVec gradient_second_order(const RVec& psi, double base,
                             double fd_step) const;

  // M_k = H_C(f_k) W_EM(f_k) for the digital closed-form step.
  std::vector<CMat> transfer_matrices(const RVec& psi) const;

  double penalty() const { return penalty_; }

 private:
  const Scenario& sc_;
  std::vector<double> alphas_;
  std::vector<CMat> w_ds_;
  double penalty_ = 0.0;
  std::unique_ptr<Impl> impl_;
};

// Objective value with explicit digital-stage variables (test oracle entry
// point).
double objective_value(const RVec& psi, const std::vector<double>& alphas,
                       const std::vector<CMat>& w_ds, const Scenario& sc);

// Minimum-norm least-squares digital stage: P = M^+ H_opt, alpha = ||P||_F /
// sqrt(4 R N_a), W_D = P / alpha (so ||W_D||_F^2 = 4 R N_a exactly). A zero
// P flags the step degenerate and returns alpha = 0 with W_D = 2 sqrt(R) I.
struct DigitalStep {
  double alpha = 0.0;
  CMat w_d;
  bool degenerate = false;
};

DigitalStep closed_form_digital_step(const CMat& m, const CMat& h_opt,
                                     double R, int n_a);

// Quasi-Newton descent over psi with the digital stage held fixed: dense
// rank-2 secant (BFGS) inverse-Hessian updates, Armijo backtracking, and
// forward-difference gradients. A failed line search triggers one recovery
// attempt with a second-order gradient estimate and a reset Hessian before
// giving up. Deterministic; objective non-increasing across accepted steps.
struct InnerResult {
  RVec psi;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;  // gradient tolerance reached
  std::vector<TraceRow> trace;
};

InnerResult minimize_psi(const RVec& psi0, const std::vector<double>& alphas,
                         const std::vector<CMat>& w_ds, const Scenario& sc,
                         const OptimizerConfig& cfg, int alternation = 1);

// STEP 0-3 alternation: initialize psi, then alternate the closed-form
// digital step with minimize_psi for n_alt rounds (stopping early on a
// relative objective stall). When the scenario disables the digital
// precoder, W_D,k is pinned to sqrt(4R) I and a single minimize_psi pass
// runs.
OptimizationResult alternate_optimize(const Scenario& sc,
                                      const OptimizerConfig& cfg);

// Power bookkeeping under uncorrelated unit streams with total power p_tx:
// column n of W_D is excited with power p_tx / N_a and the per-column powers
// add. Not available on the sim path (the masked impedance carries no
// radiation Gram).
PowerReport expected_power_report(const PartitionedImpedance& z,
                                  const CVec& z_s, const CVec& z_l,
                                  const EmWeights& w, const CMat& w_d,
                                  double p_tx);

}  // namespace dsa
