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

#include "dsa/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include "dsa/channel.hpp"
#include "dsa/coupling.hpp"
#include "dsa/rng.hpp"

namespace dsa {
namespace {

constexpr std::uint64_t kSeedGeometry = 1;
constexpr std::uint64_t kSeedOptimizer = 2;
constexpr std::uint64_t kSeedSensitivity = 3;

std::string fmt12(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string angle_label(double a) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%g", a);
  std::string s = buf;
  for (char& ch : s) {
    if (ch == '-') ch = 'm';
    if (ch == '.') ch = 'p';
  }
  return s;
}

Vec3 azimuth_direction(double angle_deg) {
  const double a = angle_deg * kPi / 180.0;
  return Vec3(std::cos(a), std::sin(a), 0.0);
}

std::uint64_t geometry_seed(const ScenarioConfig& c) {
  return c.geometry.seed != 0 ? c.geometry.seed
                              : substream_seed(c.seed, kSeedGeometry);
}

// Elements that radiate on the layered path: the outermost layer only (the
// inner layers are the masked propagation network).
DsaGeometry last_layer_subgeometry(const DsaGeometry& g) {
  const int last = g.num_layers();
  DsaGeometry out;
  for (const auto& e : g.elements)
    if (e.layer == last) out.elements.push_back(e);
  return out;
}

struct Assembly {
  DsaGeometry geometry;
  DsaGeometry radiators;
  std::vector<double> freqs;
  TestPointSet points;
  Scenario sc;
};

TestPointSet make_points(const ScenarioConfig& c, std::vector<Vec3> pos) {
  TestPointSet pts;
  pts.positions = std::move(pos);
  pts.receive_gain = from_db10(c.rx_gain_db);
  pts.kind = c.rx_kind;
  return pts;
}

Assembly build_assembly(const ScenarioConfig& c, TestPointSet points,
                        bool sim_path, double p_tx) {
  Assembly as;
  as.geometry = build_geometry(c);
  as.radiators = sim_path ? last_layer_subgeometry(as.geometry) : as.geometry;
  as.freqs = subcarrier_frequencies(c.frequency);
  as.points = std::move(points);

  as.sc.matching = c.matching;
  as.sc.sim_path = sim_path;
  as.sc.R = c.r_chain;
  as.sc.p_tx = p_tx;
  as.sc.varactor = c.varactor;
  as.sc.n_active = as.geometry.n_active();
  as.sc.n_scatterer = as.geometry.n_scatterer();

  for (double f : as.freqs) {
    SubcarrierProblem p;
    p.f = f;
    if (sim_path) {
      p.sim = build_sim_impedance(as.geometry, f);
      p.h_c = los_transimpedance(as.radiators, as.points, f).h;
    } else {
      p.z = assemble_impedance_matrix(as.geometry, f);
      p.h_c = los_transimpedance(as.geometry, as.points, f).h;
    }
    as.sc.subcarriers.push_back(std::move(p));
  }
  return as;
}

OptimizerConfig optimizer_config(const ScenarioConfig& c) {
  OptimizerConfig cfg = c.optimizer;
  cfg.seed = substream_seed(c.seed, kSeedOptimizer);
  return cfg;
}

CVec scatterer_loads(const Scenario& sc, const RVec& psi, double f) {
  CVec z_s(sc.n_scatterer);
  for (int n = 0; n < sc.n_scatterer; ++n)
    z_s[n] = varactor_impedance(f, psi[n], sc.varactor);
  return z_s;
}

CVec active_loads(const Scenario& sc, const RVec& psi, double f) {
  CVec z_l(0);
  if (!sc.sim_path && sc.matching == MatchingTag::simplified) {
    z_l.resize(sc.n_active);
    for (int m = 0; m < sc.n_active; ++m)
      z_l[m] = varactor_impedance(f, psi[sc.n_scatterer + m], sc.varactor);
  }
  return z_l;
}

EmWeights weights_at(const Scenario& sc, const SubcarrierProblem& p,
                     const CVec& z_s, const CVec& z_l) {
  return sc.matching == MatchingTag::simplified
             ? em_weights_simplified(p.z, z_s, z_l, sc.R)
             : em_weights_perfect(p.z, z_s, sc.R);
}

// Physical end-to-end channel H_C W_EM W_D at subcarrier k (either path).
// The channel rows are a parameter so callers can substitute an
// untransformed variant of the stored h_c.
CMat end_to_end(const Assembly& as, const CMat& h_c, const RVec& psi,
                const CMat& w_d, std::size_t k) {
  const auto& p = as.sc.subcarriers[k];
  const CVec z_s = scatterer_loads(as.sc, psi, p.f);
  if (as.sc.sim_path) {
    const CMat w = sim_em_weights(p.sim, z_s, as.sc.R);
    return h_c * (w * w_d);
  }
  const CVec z_l = active_loads(as.sc, psi, p.f);
  const EmWeights w = weights_at(as.sc, p, z_s, z_l);
  return h_c * (w.w * w_d);
}

double row_dominance_db(const RMat& entries_db) {
  double worst = std::numeric_limits<double>::infinity();
  const Eigen::Index n = std::min(entries_db.rows(), entries_db.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    double off = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < entries_db.cols(); ++j)
      if (j != i) off = std::max(off, entries_db(i, j));
    worst = std::min(worst, entries_db(i, i) - off);
  }
  return worst;
}

RMat entries_db(const CMat& h) {
  RMat out(h.rows(), h.cols());
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    for (Eigen::Index j = 0; j < h.cols(); ++j)
      out(i, j) = db20(std::abs(h(i, j)));
  return out;
}

// Directivity bookkeeping for one excitation column: exact steering-angle
// value, grid maximum, and the 1-degree azimuth cut.
struct PatternSummary {
  double d_steer_db = 0.0;
  double d_max_db = 0.0;
  double p_rad = 0.0;
  RVec cut_linear;
};

PatternSummary summarize_pattern(const DsaGeometry& radiators, const CVec& i,
                                 double f, double angle_deg,
                                 double p_rad_quadform, bool sim_path) {
  const SphereGrid grid = make_sphere_grid(1.0);
  const RVec u_grid = radiation_intensity(i, radiators, f, grid.directions);
  PatternSummary out;
  out.p_rad = sim_path ? integrate_over_sphere(grid, u_grid) : p_rad_quadform;
  const std::vector<Vec3> steer_dir{azimuth_direction(angle_deg)};
  const RVec u_steer = radiation_intensity(i, radiators, f, steer_dir);
  out.d_steer_db = db10(4.0 * kPi * u_steer[0] / out.p_rad);
  out.d_max_db = db10(4.0 * kPi * u_grid.maxCoeff() / out.p_rad);
  const std::vector<Vec3> cut = azimuth_cut_directions(1.0);
  out.cut_linear = directivity_values(radiation_intensity(i, radiators, f, cut),
                                      out.p_rad);
  return out;
}

// Steering-angle directivity for a given psi at one (subcarrier, input)
// pair; shares every numeric step with the nominal metrics so sigma_rel = 0
// reproduces them exactly.
std::pair<double, double> beam_metric_at(const Assembly& as, const RVec& psi,
                                         const CMat& w_d, std::size_t k,
                                         int input, double angle_deg) {
  const auto& p = as.sc.subcarriers[k];
  const CVec z_s = scatterer_loads(as.sc, psi, p.f);
  const CVec v_g =
      std::sqrt(as.sc.p_tx / as.sc.n_active) * CVec(w_d.col(input));
  const std::vector<Vec3> steer_dir{azimuth_direction(angle_deg)};
  if (as.sc.sim_path) {
    const CMat w = sim_em_weights(p.sim, z_s, as.sc.R);
    const CVec i = w * v_g;
    const SphereGrid grid = make_sphere_grid(1.0);
    const double p_rad = integrate_over_sphere(
        grid, radiation_intensity(i, as.radiators, p.f, grid.directions));
    const double u = radiation_intensity(i, as.radiators, p.f, steer_dir)[0];
    return {db10(4.0 * kPi * u / p_rad), 0.0};
  }
  const CVec z_l = active_loads(as.sc, psi, p.f);
  const EmWeights w = weights_at(as.sc, p, z_s, z_l);
  const PowerReport pr = power_report(p.z, z_s, z_l, w, v_g, as.sc.R);
  const CVec i = w.w * v_g;
  const double u = radiation_intensity(i, as.radiators, p.f, steer_dir)[0];
  return {db10(4.0 * kPi * u / pr.p_rad), pr.eta_m};
}

Assembly build_beam_assembly(const ScenarioConfig& c, bool sim_path) {
  Assembly as = build_assembly(
      c, make_points(c, ring_positions(c.beam.distance, c.beam.points)),
      sim_path, c.beam.p_tx);
  as.sc.digital_precoder = false;
  return as;
}

BeamRun beam_metrics(const Assembly& as, const OptimizationResult& opt,
                     std::size_t k, int input, double angle_deg) {
  BeamRun run;
  run.angle_deg = angle_deg;
  run.subcarrier = static_cast<int>(k);
  run.input = input;
  run.opt = opt;
  run.n_scatterer = as.sc.n_scatterer;

  const auto& p = as.sc.subcarriers[k];
  const CVec z_s = scatterer_loads(as.sc, opt.psi_hat, p.f);
  const CVec v_g = std::sqrt(as.sc.p_tx / as.sc.n_active) *
                   CVec(opt.w_d_hat[k].col(input));
  CVec i;
  double p_rad_quadform = 0.0;
  if (as.sc.sim_path) {
    i = sim_em_weights(p.sim, z_s, as.sc.R) * v_g;
  } else {
    const CVec z_l = active_loads(as.sc, opt.psi_hat, p.f);
    const EmWeights w = weights_at(as.sc, p, z_s, z_l);
    const PowerReport pr = power_report(p.z, z_s, z_l, w, v_g, as.sc.R);
    i = w.w * v_g;
    p_rad_quadform = pr.p_rad;
    run.power = pr;
  }
  const PatternSummary ps = summarize_pattern(as.radiators, i, p.f, angle_deg,
                                              p_rad_quadform, as.sc.sim_path);
  run.d_steer_db = ps.d_steer_db;
  run.d_max_db = ps.d_max_db;
  run.p_rad = ps.p_rad;
  run.cut_db = ps.cut_linear.unaryExpr([](double d) { return db10(d); });
  return run;
}

}  // namespace

std::vector<double> subcarrier_frequencies(const FrequencyConfig& fc) {
  std::vector<double> f(static_cast<std::size_t>(fc.subcarriers));
  for (int k = 0; k < fc.subcarriers; ++k)
    f[static_cast<std::size_t>(k)] =
        fc.f0 + k * fc.bandwidth / fc.subcarriers;
  return f;
}

DsaGeometry build_geometry(const ScenarioConfig& c) {
  RingDiskSpec spec;
  spec.ring_step = c.geometry.ring_step;
  spec.rings = c.geometry.rings;
  spec.stacks = c.geometry.stacks;
  spec.num_active = c.geometry.n_active;
  spec.frequency = c.frequency.f0;
  switch (c.geometry.shape) {
    case GeometryShape::disk:
    case GeometryShape::sim_layers:
    case GeometryShape::cylinder:
      return make_disk_geometry(spec);
    case GeometryShape::random: {
      const double lam = c.lambda0();
      const double area = kPi * c.geometry.disk_radius * c.geometry.disk_radius;
      const int n_s = std::max(
          1, static_cast<int>(std::lround(c.geometry.density * area /
                                          (lam * lam))));
      return make_random_disk_geometry(c.geometry.disk_radius, n_s, spec,
                                       geometry_seed(c));
    }
    case GeometryShape::file:
      return load_geometry_csv(c.geometry.path);
  }
  throw ConfigError("unhandled geometry shape");
}

int steering_index(double angle_deg, int points) {
  double a = std::fmod(angle_deg, 360.0);
  if (a < 0.0) a += 360.0;
  int t = static_cast<int>(std::lround(a / 360.0 * points));
  if (t == 0) t = points;
  return t;
}

std::vector<BeamRun> run_beam(const ScenarioConfig& c, bool sim_path) {
  Assembly as = build_beam_assembly(c, sim_path);
  const int K = static_cast<int>(as.sc.subcarriers.size());
  const int na = as.sc.n_active;
  const auto& angles = c.beam.angles_deg;
  const OptimizerConfig cfg = optimizer_config(c);
  std::vector<BeamRun> runs;

  if (K * na == 1) {
    for (double angle : angles) {
      const std::vector<std::vector<int>> steer{
          {steering_index(angle, c.beam.points)}};
      const TargetSpec target =
          beam_target(c.beam.points, steer, c.beam.target_rx_power);
      as.sc.subcarriers[0].h_opt = target.h_opt[0];
      const OptimizationResult opt = alternate_optimize(as.sc, cfg);
      runs.push_back(beam_metrics(as, opt, 0, 0, angle));
    }
    return runs;
  }

  if (static_cast<int>(angles.size()) != K * na)
    throw ConfigError(
        "beam.angles must list one angle per (subcarrier, input)");
  std::vector<std::vector<int>> steer(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    steer[static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(na));
    for (int m = 0; m < na; ++m)
      steer[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)] =
          steering_index(angles[static_cast<std::size_t>(k * na + m)],
                         c.beam.points);
  }
  const TargetSpec target =
      beam_target(c.beam.points, steer, c.beam.target_rx_power);
  for (int k = 0; k < K; ++k)
    as.sc.subcarriers[static_cast<std::size_t>(k)].h_opt =
        target.h_opt[static_cast<std::size_t>(k)];
  const OptimizationResult opt = alternate_optimize(as.sc, cfg);
  for (int k = 0; k < K; ++k)
    for (int m = 0; m < na; ++m)
      runs.push_back(beam_metrics(as, opt, static_cast<std::size_t>(k), m,
                                  angles[static_cast<std::size_t>(k * na + m)]));
  return runs;
}

SensitivityResult beam_sensitivity(const ScenarioConfig& c,
                                   const BeamRun& nominal, double sigma_rel,
                                   bool sim_path) {
  Assembly as = build_beam_assembly(c, sim_path);
  const std::size_t k = static_cast<std::size_t>(nominal.subcarrier);
  const CMat w_d = nominal.opt.w_d_hat[k];
  const MetricEvaluator eval = [&](const RVec& psi) {
    return beam_metric_at(as, psi, w_d, k, nominal.input, nominal.angle_deg);
  };
  return sensitivity_analysis(nominal.opt.psi_hat, as.sc.n_scatterer,
                              sigma_rel, c.sensitivity.trials,
                              substream_seed(c.seed, kSeedSensitivity), eval);
}

MisoRun run_miso(const ScenarioConfig& c, bool sim_path) {
  std::vector<Vec3> pos;
  pos.reserve(c.miso.angles_deg.size());
  for (double a : c.miso.angles_deg)
    pos.push_back(c.miso.distance * azimuth_direction(a));
  Assembly as =
      build_assembly(c, make_points(c, std::move(pos)), sim_path, c.miso.p_tx);
  as.sc.digital_precoder = true;

  std::vector<Transimpedance> hs;
  for (const auto& p : as.sc.subcarriers) hs.push_back({p.h_c, p.f});
  const TargetSpec target = zf_target(hs);
  for (std::size_t k = 0; k < as.sc.subcarriers.size(); ++k)
    as.sc.subcarriers[k].h_opt = target.h_opt[k];

  MisoRun run;
  run.opt = alternate_optimize(as.sc, optimizer_config(c));

  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < as.sc.subcarriers.size(); ++k) {
    run.h_e2e.push_back(end_to_end(as, as.sc.subcarriers[k].h_c,
                                   run.opt.psi_hat, run.opt.w_d_hat[k], k));
    worst = std::min(worst, row_dominance_db(entries_db(run.h_e2e.back())));
  }
  run.dominance_db = worst;
  for (double s2 : c.miso.noise_w) {
    double se = 0.0;
    for (const auto& h : run.h_e2e)
      se += sum_spectral_efficiency(h, s2, c.miso.p_tx);
    run.se.push_back(se / static_cast<double>(run.h_e2e.size()));
  }
  return run;
}

namespace {

struct MimoAssembly {
  Assembly as;
  std::vector<CMat> h_raw;  // untransformed T x N per subcarrier
  TargetSpec svd;
};

MimoAssembly build_mimo_assembly(const ScenarioConfig& c, bool sim_path) {
  MimoAssembly ma;
  const Vec3 center(c.mimo.user_distance, 0.0, 0.0);
  ma.as = build_assembly(
      c,
      make_points(c, ula_positions(center, c.mimo.rx_elements,
                                   c.mimo.rx_spacing, Vec3::UnitY())),
      sim_path, c.mimo.p_tx);
  ma.as.sc.digital_precoder = true;

  NlosSpec nlos;
  for (std::size_t s = 0; s < c.mimo.scatter_angles_deg.size(); ++s) {
    nlos.positions.push_back(c.mimo.scatter_distance *
                             azimuth_direction(c.mimo.scatter_angles_deg[s]));
    nlos.coefficients.push_back(
        std::pow(10.0, c.mimo.scatter_gains_db[s] / 20.0));
  }

  std::vector<Transimpedance> hs;
  for (auto& p : ma.as.sc.subcarriers) {
    const DsaGeometry& src = ma.as.radiators;
    Transimpedance h = nlos_transimpedance(src, ma.as.points, nlos, p.f);
    ma.h_raw.push_back(h.h);
    hs.push_back(std::move(h));
  }
  ma.svd = svd_target(hs, c.mimo.rank);
  for (std::size_t k = 0; k < ma.as.sc.subcarriers.size(); ++k) {
    auto& p = ma.as.sc.subcarriers[k];
    p.h_c = ma.svd.combiner[k].adjoint() * ma.h_raw[k];
    p.h_opt = CMat(ma.svd.gains[k].cast<Cplx>().asDiagonal());
  }
  return ma;
}

}  // namespace

MimoRun run_mimo(const ScenarioConfig& c, bool sim_path) {
  if (c.mimo.rank != c.geometry.n_active)
    throw ConfigError("mimo.rank must equal geometry.n_active");
  MimoAssembly ma = build_mimo_assembly(c, sim_path);

  MimoRun run;
  run.opt = alternate_optimize(ma.as.sc, optimizer_config(c));

  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ma.as.sc.subcarriers.size(); ++k) {
    // The stored h_c is combiner-transformed; the physical channel metric
    // needs the untransformed rows.
    run.h_e2e.push_back(end_to_end(ma.as, ma.h_raw[k], run.opt.psi_hat,
                                   run.opt.w_d_hat[k], k));
    const RMat rep =
        diagonalization_report(ma.svd.combiner[k], run.h_e2e.back());
    if (k == 0) run.report_db = rep;
    worst = std::min(worst, row_dominance_db(rep));
  }
  run.dominance_db = worst;
  run.se = sum_spectral_efficiency(
      CMat(ma.svd.combiner[0].adjoint() * run.h_e2e[0]), c.mimo.noise,
      c.mimo.p_tx);
  return run;
}

SensitivityResult mimo_sensitivity(const ScenarioConfig& c,
                                   const MimoRun& nominal, double sigma_rel) {
  MimoAssembly ma = build_mimo_assembly(c, false);
  const MetricEvaluator eval = [&](const RVec& psi) {
    double worst = std::numeric_limits<double>::infinity();
    double eta_m = 0.0;
    for (std::size_t k = 0; k < ma.as.sc.subcarriers.size(); ++k) {
      const CMat h =
          end_to_end(ma.as, ma.h_raw[k], psi, nominal.opt.w_d_hat[k], k);
      worst = std::min(
          worst, row_dominance_db(diagonalization_report(ma.svd.combiner[k], h)));
      const auto& p = ma.as.sc.subcarriers[k];
      const CVec z_s = scatterer_loads(ma.as.sc, psi, p.f);
      const CVec z_l = active_loads(ma.as.sc, psi, p.f);
      const EmWeights w = weights_at(ma.as.sc, p, z_s, z_l);
      eta_m += expected_power_report(p.z, z_s, z_l, w, nominal.opt.w_d_hat[k],
                                     ma.as.sc.p_tx)
                   .eta_m;
    }
    eta_m /= static_cast<double>(ma.as.sc.subcarriers.size());
    return std::make_pair(worst, eta_m);
  };
  return sensitivity_analysis(nominal.opt.psi_hat, ma.as.sc.n_scatterer,
                              sigma_rel, c.sensitivity.trials,
                              substream_seed(c.seed, kSeedSensitivity), eval);
}

namespace {

namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("failed writing " + path.string());
}

class ArtifactWriter {
 public:
  ArtifactWriter(const ScenarioConfig& c, const std::string& out_dir)
      : dir_(out_dir), start_(std::chrono::steady_clock::now()) {
    fs::create_directories(dir_);
    add_text("config_resolved.txt", echo_config(c));
  }

  void add_text(const std::string& name, const std::string& content) {
    write_text(dir_ / name, content);
    manifest_.push_back(name);
  }

  void add_pattern(const std::string& name, const RVec& cut_db) {
    const std::vector<Vec3> dirs = azimuth_cut_directions(1.0);
    RVec linear(cut_db.size());
    for (Eigen::Index i = 0; i < cut_db.size(); ++i)
      linear[i] = from_db10(cut_db[i]);
    save_pattern_csv((dir_ / name).string(), dirs, linear);
    manifest_.push_back(name);
  }

  void add_trace(const std::vector<std::pair<std::string,
                                             const std::vector<TraceRow>*>>&
                     traces) {
    std::ostringstream out;
    out << "run,alternation,inner,objective\n";
    for (const auto& [label, rows] : traces)
      for (const auto& r : *rows)
        out << label << ',' << r.alternation << ',' << r.inner << ','
            << fmt17(r.objective) << '\n';
    add_text("trace.csv", out.str());
  }

  void add_lambda(const std::vector<std::pair<std::string, const RVec*>>&
                      solutions) {
    std::ostringstream out;
    out << "run,index,value\n";
    for (const auto& [label, psi] : solutions)
      for (Eigen::Index i = 0; i < psi->size(); ++i)
        out << label << ',' << i << ',' << fmt17((*psi)[i]) << '\n';
    add_text("lambda_hat.csv", out.str());
  }

  // report.txt plus manifest.txt close the run; timings stay out of the
  // manifest because they are not reproducible.
  std::vector<std::string> finish(const std::string& report) {
    add_text("report.txt", report);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start_)
            .count();
    write_text(dir_ / "timings.txt",
               "wall_clock_s = " + fmt12(secs) + "\n");
    std::ostringstream m;
    for (const auto& f : manifest_) m << f << '\n';
    write_text(dir_ / "manifest.txt", m.str());
    manifest_.push_back("manifest.txt");
    return manifest_;
  }

 private:
  fs::path dir_;
  std::vector<std::string> manifest_;
  std::chrono::steady_clock::time_point start_;
};

void describe_beam_run(std::ostringstream& r, const std::string& prefix,
                       const BeamRun& run, bool sim_path) {
  r << prefix << ".angle_deg = " << fmt12(run.angle_deg) << "\n";
  r << prefix << ".d_steer_db = " << fmt12(run.d_steer_db) << "\n";
  r << prefix << ".d_max_db = " << fmt12(run.d_max_db) << "\n";
  r << prefix << ".p_rad_w = " << fmt12(run.p_rad) << "\n";
  if (!sim_path) {
    r << prefix << ".eta_m = " << fmt12(run.power.eta_m) << "\n";
    r << prefix << ".eta_d = " << fmt12(run.power.eta_d) << "\n";
    r << prefix << ".q = " << fmt12(run.power.q) << "\n";
  }
  r << prefix << ".objective = " << fmt12(run.opt.objective) << "\n";
  r << prefix << ".converged = " << (run.opt.converged ? 1 : 0) << "\n";
}

// One label per beam run, "_<i>"-suffixed when an angle repeats across runs.
std::vector<std::string> beam_labels(const std::vector<BeamRun>& runs) {
  std::vector<std::string> labels;
  std::set<std::string> used;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::string label = "angle_" + angle_label(runs[i].angle_deg);
    if (!used.insert(label).second) label += "_" + std::to_string(i);
    labels.push_back(label);
  }
  return labels;
}

bool joint_beam(const std::vector<BeamRun>& runs) {
  return runs.size() > 1 &&
         (runs.front().subcarrier != runs.back().subcarrier ||
          runs.front().input != runs.back().input);
}

std::vector<std::string> beam_report(const ScenarioConfig& c,
                                     const std::string& out_dir,
                                     bool sim_path) {
  const std::vector<BeamRun> runs = run_beam(c, sim_path);
  const std::vector<std::string> labels = beam_labels(runs);
  ArtifactWriter w(c, out_dir);

  std::ostringstream r;
  r << "usecase = beam\n";
  r << "path = " << (sim_path ? "layered" : "general") << "\n";
  r << "n_scatterer = " << runs.front().n_scatterer << "\n";
  std::vector<std::pair<std::string, const std::vector<TraceRow>*>> traces;
  std::vector<std::pair<std::string, const RVec*>> solutions;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    describe_beam_run(r, labels[i], runs[i], sim_path);
    w.add_pattern("pattern_" + labels[i] + ".csv", runs[i].cut_db);
    if (!joint_beam(runs)) {
      traces.emplace_back(labels[i], &runs[i].opt.trace);
      solutions.emplace_back(labels[i], &runs[i].opt.psi_hat);
    }
  }
  if (joint_beam(runs)) {
    traces.emplace_back("joint", &runs.front().opt.trace);
    solutions.emplace_back("joint", &runs.front().opt.psi_hat);
  }
  for (std::size_t si = 0; si < c.sensitivity.sigma_rel.size(); ++si) {
    const double sigma = c.sensitivity.sigma_rel[si];
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const SensitivityResult sr =
          beam_sensitivity(c, runs[i], sigma, sim_path);
      const std::string label = labels[i] + ".sens_" + std::to_string(si);
      r << label << ".sigma_rel = " << fmt12(sigma) << "\n";
      r << label << ".mean_db = " << fmt12(sr.mean) << "\n";
      r << label << ".stdev_db = " << fmt12(sr.stdev) << "\n";
      r << label << ".loss_db = " << fmt12(runs[i].d_steer_db - sr.mean)
        << "\n";
    }
  }
  w.add_trace(traces);
  w.add_lambda(solutions);
  return w.finish(r.str());
}

std::vector<std::string> miso_report(const ScenarioConfig& c,
                                     const std::string& out_dir,
                                     bool sim_path) {
  const MisoRun run = run_miso(c, sim_path);
  ArtifactWriter w(c, out_dir);
  std::ostringstream r;
  r << "usecase = miso\n";
  r << "path = " << (sim_path ? "layered" : "general") << "\n";
  r << "dominance_db = " << fmt12(run.dominance_db) << "\n";
  r << "objective = " << fmt12(run.opt.objective) << "\n";
  for (std::size_t i = 0; i < run.se.size(); ++i) {
    r << "noise_" << i << ".sigma2_w = " << fmt12(c.miso.noise_w[i]) << "\n";
    r << "noise_" << i << ".sum_se = " << fmt12(run.se[i]) << "\n";
  }
  for (std::size_t k = 0; k < run.opt.power.size(); ++k) {
    r << "sub_" << k << ".eta_m = " << fmt12(run.opt.power[k].eta_m) << "\n";
    r << "sub_" << k << ".eta_d = " << fmt12(run.opt.power[k].eta_d) << "\n";
  }
  w.add_trace({{"miso", &run.opt.trace}});
  w.add_lambda({{"miso", &run.opt.psi_hat}});
  return w.finish(r.str());
}

std::vector<std::string> mimo_report(const ScenarioConfig& c,
                                     const std::string& out_dir,
                                     bool sim_path) {
  const MimoRun run = run_mimo(c, sim_path);
  ArtifactWriter w(c, out_dir);
  std::ostringstream r;
  r << "usecase = mimo-precoder\n";
  r << "path = " << (sim_path ? "layered" : "general") << "\n";
  r << "dominance_db = " << fmt12(run.dominance_db) << "\n";
  r << "sum_se = " << fmt12(run.se) << "\n";
  r << "objective = " << fmt12(run.opt.objective) << "\n";
  for (Eigen::Index i = 0; i < run.report_db.rows(); ++i)
    for (Eigen::Index j = 0; j < run.report_db.cols(); ++j)
      r << "report_" << i << '_' << j << "_db = "
        << fmt12(run.report_db(i, j)) << "\n";
  for (std::size_t si = 0; si < c.sensitivity.sigma_rel.size(); ++si) {
    const double sigma = c.sensitivity.sigma_rel[si];
    const SensitivityResult sr = mimo_sensitivity(c, run, sigma);
    r << "sens_" << si << ".sigma_rel = " << fmt12(sigma) << "\n";
    r << "sens_" << si << ".mean_db = " << fmt12(sr.mean) << "\n";
    r << "sens_" << si << ".stdev_db = " << fmt12(sr.stdev) << "\n";
  }
  w.add_trace({{"mimo", &run.opt.trace}});
  w.add_lambda({{"mimo", &run.opt.psi_hat}});
  return w.finish(r.str());
}

struct SweepRow {
  double value = 0.0;
  double d_db = 0.0;
  double eta_m = 0.0;
  double eta_d = 0.0;
  double q = 0.0;
  int n_s = 0;
};

SweepRow sweep_point(const ScenarioConfig& base, double value) {
  ScenarioConfig c = base;
  if (base.sweep.axis == "ring_step") {
    c.geometry.ring_step = value;
    c.geometry.disk_radius = c.geometry.rings * value;
  } else if (base.sweep.axis == "rings") {
    c.geometry.rings = static_cast<int>(std::lround(value));
  } else if (base.sweep.axis == "stacks") {
    c.geometry.stacks = static_cast<int>(std::lround(value));
  }
  c.beam.angles_deg = {base.beam.angles_deg.front()};
  c.validate();
  const BeamRun run = run_beam(c, false).front();
  SweepRow row;
  row.value = value;
  row.d_db = run.d_steer_db;
  row.eta_m = run.power.eta_m;
  row.eta_d = run.power.eta_d;
  row.q = run.power.q;
  row.n_s = run.n_scatterer;
  return row;
}

std::vector<std::string> sweep_report(const ScenarioConfig& c,
                                      const std::string& out_dir,
                                      int workers) {
  std::vector<SweepRow> rows(c.sweep.values.size());
  if (c.sweep.axis == "ring_step" || c.sweep.axis == "rings" ||
      c.sweep.axis == "stacks") {
    const std::size_t n = c.sweep.values.size();
    std::size_t next = 0;
    while (next < n) {
      std::vector<std::future<SweepRow>> batch;
      const std::size_t stop =
          std::min(n, next + static_cast<std::size_t>(std::max(1, workers)));
      for (std::size_t i = next; i < stop; ++i)
        batch.push_back(std::async(std::launch::async, sweep_point,
                                   std::cref(c), c.sweep.values[i]));
      for (std::size_t i = next; i < stop; ++i)
        rows[i] = batch[i - next].get();
      next = stop;
    }
  } else if (c.sweep.axis == "sigma_rel") {
    ScenarioConfig single = c;
    single.beam.angles_deg = {c.beam.angles_deg.front()};
    const BeamRun nominal = run_beam(single, false).front();
    for (std::size_t i = 0; i < c.sweep.values.size(); ++i) {
      const SensitivityResult sr =
          beam_sensitivity(single, nominal, c.sweep.values[i], false);
      rows[i] = {c.sweep.values[i], sr.mean, sr.eta_m.mean(),
                 nominal.power.eta_d, nominal.power.q, nominal.n_scatterer};
    }
  } else if (c.sweep.axis == "noise") {
    ScenarioConfig single = c;
    single.miso.noise_w.assign(c.sweep.values.begin(), c.sweep.values.end());
    const MisoRun run = run_miso(single, false);
    for (std::size_t i = 0; i < c.sweep.values.size(); ++i)
      rows[i] = {c.sweep.values[i], run.se[i], 0.0, 0.0, 0.0, 0};
  } else {
    throw ConfigError("sweep.axis must be one of ring_step, rings, stacks, "
                      "sigma_rel, noise");
  }

  ArtifactWriter w(c, out_dir);
  std::ostringstream r;
  r << "usecase = sweep\n";
  r << "axis = " << c.sweep.axis << "\n";
  std::ostringstream t;
  t << "value,d_db,eta_m,eta_d,q,n_s\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SweepRow& row = rows[i];
    r << "row_" << i << ".value = " << fmt12(row.value) << "\n";
    r << "row_" << i << ".d_db = " << fmt12(row.d_db) << "\n";
    r << "row_" << i << ".eta_m = " << fmt12(row.eta_m) << "\n";
    r << "row_" << i << ".eta_d = " << fmt12(row.eta_d) << "\n";
    r << "row_" << i << ".q = " << fmt12(row.q) << "\n";
    r << "row_" << i << ".n_s = " << row.n_s << "\n";
    t << fmt12(row.value) << ',' << fmt12(row.d_db) << ',' << fmt12(row.eta_m)
      << ',' << fmt12(row.eta_d) << ',' << fmt12(row.q) << ',' << row.n_s
      << '\n';
  }
  w.add_text("table.csv", t.str());
  return w.finish(r.str());
}

}  // namespace

std::vector<std::string> run_scenario(const ScenarioConfig& c,
                                      const std::string& out_dir,
                                      int workers) {
  switch (c.usecase) {
    case UseCase::beam:
      return beam_report(c, out_dir,
                         c.geometry.shape == GeometryShape::sim_layers);
    case UseCase::miso:
      return miso_report(c, out_dir,
                         c.geometry.shape == GeometryShape::sim_layers);
    case UseCase::mimo_precoder:
      return mimo_report(c, out_dir,
                         c.geometry.shape == GeometryShape::sim_layers);
    case UseCase::sweep:
      return run_sweep(c, out_dir, workers);
  }
  throw ConfigError("unhandled use case");
}

std::vector<std::string> run_sweep(const ScenarioConfig& c,
                                   const std::string& out_dir, int workers) {
  if (c.sweep.axis.empty())
    throw ConfigError("sweep requires sweep.axis and sweep.values");
  return sweep_report(c, out_dir, workers);
}

std::vector<std::string> run_compare_sim(const ScenarioConfig& c,
                                         const std::string& out_dir,
                                         int /*workers*/) {
  std::ostringstream r;
  r << "usecase = compare-sim\n";
  r << "base = " << to_string(c.usecase) << "\n";

  if (c.usecase == UseCase::beam) {
    const std::vector<BeamRun> dsa = run_beam(c, false);
    const std::vector<BeamRun> sim = run_beam(c, true);
    const std::vector<std::string> labels = beam_labels(dsa);
    ArtifactWriter w(c, out_dir);
    std::vector<std::pair<std::string, const std::vector<TraceRow>*>> traces;
    std::vector<std::pair<std::string, const RVec*>> solutions;
    for (std::size_t i = 0; i < dsa.size(); ++i) {
      describe_beam_run(r, "dsa." + labels[i], dsa[i], false);
      describe_beam_run(r, "sim." + labels[i], sim[i], true);
      r << labels[i] << ".gap_db = "
        << fmt12(dsa[i].d_steer_db - sim[i].d_steer_db) << "\n";
      w.add_pattern("pattern_dsa_" + labels[i] + ".csv", dsa[i].cut_db);
      w.add_pattern("pattern_sim_" + labels[i] + ".csv", sim[i].cut_db);
      if (!joint_beam(dsa)) {
        traces.emplace_back("dsa." + labels[i], &dsa[i].opt.trace);
        traces.emplace_back("sim." + labels[i], &sim[i].opt.trace);
        solutions.emplace_back("dsa." + labels[i], &dsa[i].opt.psi_hat);
        solutions.emplace_back("sim." + labels[i], &sim[i].opt.psi_hat);
      }
    }
    if (joint_beam(dsa)) {
      traces = {{"dsa", &dsa.front().opt.trace},
                {"sim", &sim.front().opt.trace}};
      solutions = {{"dsa", &dsa.front().opt.psi_hat},
                   {"sim", &sim.front().opt.psi_hat}};
    }
    w.add_trace(traces);
    w.add_lambda(solutions);
    return w.finish(r.str());
  }
  if (c.usecase == UseCase::miso) {
    const MisoRun dsa = run_miso(c, false);
    const MisoRun sim = run_miso(c, true);
    ArtifactWriter w(c, out_dir);
    r << "dsa.dominance_db = " << fmt12(dsa.dominance_db) << "\n";
    r << "sim.dominance_db = " << fmt12(sim.dominance_db) << "\n";
    for (std::size_t i = 0; i < dsa.se.size(); ++i) {
      r << "noise_" << i << ".sigma2_w = " << fmt12(c.miso.noise_w[i]) << "\n";
      r << "noise_" << i << ".dsa_se = " << fmt12(dsa.se[i]) << "\n";
      r << "noise_" << i << ".sim_se = " << fmt12(sim.se[i]) << "\n";
    }
    w.add_trace({{"dsa", &dsa.opt.trace}, {"sim", &sim.opt.trace}});
    w.add_lambda({{"dsa", &dsa.opt.psi_hat}, {"sim", &sim.opt.psi_hat}});
    return w.finish(r.str());
  }
  if (c.usecase == UseCase::mimo_precoder) {
    const MimoRun dsa = run_mimo(c, false);
    const MimoRun sim = run_mimo(c, true);
    ArtifactWriter w(c, out_dir);
    r << "dsa.dominance_db = " << fmt12(dsa.dominance_db) << "\n";
    r << "sim.dominance_db = " << fmt12(sim.dominance_db) << "\n";
    r << "dsa.sum_se = " << fmt12(dsa.se) << "\n";
    r << "sim.sum_se = " << fmt12(sim.se) << "\n";
    w.add_trace({{"dsa", &dsa.opt.trace}, {"sim", &sim.opt.trace}});
    w.add_lambda({{"dsa", &dsa.opt.psi_hat}, {"sim", &sim.opt.psi_hat}});
    return w.finish(r.str());
  }
  throw ConfigError("compare-sim supports beam, miso, and mimo-precoder");
}

}  // namespace dsa
