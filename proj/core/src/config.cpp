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

#include "dsa/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace dsa {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& s, const std::string& key) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty())
    throw ConfigError(key + ": '" + s + "' is not a number");
  return v;
}

long to_long(const std::string& s, const std::string& key) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || s.empty())
    throw ConfigError(key + ": '" + s + "' is not an integer");
  return v;
}

enum class Unit { frequency, distance, power, angle, resistance, gain, plain };

const char* unit_name(Unit u) {
  switch (u) {
    case Unit::frequency: return "GHz";
    case Unit::distance: return "m or lambda";
    case Unit::power: return "W or dBm";
    case Unit::angle: return "deg";
    case Unit::resistance: return "ohm";
    case Unit::gain: return "dB";
    case Unit::plain: return "no unit";
  }
  return "";
}

// Splits "<number> [suffix]"; the suffix is the trailing token that does not
// parse as part of the number.
void split_unit(const std::string& entry, std::string& num,
                std::string& unit) {
  const auto pos = entry.find_last_of(" \t");
  if (pos == std::string::npos) {
    num = entry;
    unit = "";
    return;
  }
  num = trim(entry.substr(0, pos));
  unit = trim(entry.substr(pos + 1));
}

double convert(double v, const std::string& unit, Unit u, double lambda,
               const std::string& key) {
  switch (u) {
    case Unit::frequency:
      if (unit == "GHz") return v * 1e9;
      break;
    case Unit::distance:
      if (unit == "m") return v;
      if (unit == "lambda") return v * lambda;
      break;
    case Unit::power:
      if (unit == "W") return v;
      if (unit == "dBm") return std::pow(10.0, (v - 30.0) / 10.0);
      break;
    case Unit::angle:
      if (unit == "deg") return v;
      break;
    case Unit::resistance:
      if (unit == "ohm") return v;
      break;
    case Unit::gain:
      if (unit == "dB") return v;  // kept in decibels
      break;
    case Unit::plain:
      if (unit.empty()) return v;
      break;
  }
  throw ConfigError(key + ": expected " + std::string(unit_name(u)) +
                    ", got '" + unit + "'");
}

class Cursor {
 public:
  explicit Cursor(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("line " + std::to_string(line_no) +
                          ": expected key = value");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw ConfigError("line " + std::to_string(line_no) +
                                         ": empty key");
      if (!kv_.emplace(key, value).second)
        throw ConfigError("duplicate key '" + key + "'");
    }
  }

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  std::string raw(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
  }

  double quantity(const std::string& key, Unit u, double fallback) {
    used_.insert(key);
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::string num, unit;
    split_unit(it->second, num, unit);
    return convert(to_double(num, key), unit, u, lambda_, key);
  }

  int integer(const std::string& key, int fallback) {
    used_.insert(key);
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    return static_cast<int>(to_long(it->second, key));
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) {
    used_.insert(key);
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(it->second.c_str(), &end, 10);
    if (end != it->second.c_str() + it->second.size() || it->second.empty())
      throw ConfigError(key + ": '" + it->second + "' is not an integer");
    return static_cast<std::uint64_t>(v);
  }

  // Comma-separated numbers; one unit suffix on the last entry covers all.
  std::vector<double> list(const std::string& key, Unit u,
                           const std::vector<double>& fallback) {
    used_.insert(key);
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::vector<std::string> nums;
    std::string unit;
    std::string entry;
    std::istringstream in(it->second);
    while (std::getline(in, entry, ',')) {
      entry = trim(entry);
      if (entry.empty()) throw ConfigError(key + ": empty list entry");
      std::string num, suffix;
      split_unit(entry, num, suffix);
      if (!suffix.empty()) {
        if (!unit.empty() && suffix != unit)
          throw ConfigError(key + ": mixed units");
        unit = suffix;
      }
      nums.push_back(num);
    }
    if (nums.empty()) throw ConfigError(key + ": empty list");
    std::vector<double> out;
    out.reserve(nums.size());
    for (const auto& n : nums)
      out.push_back(convert(to_double(n, key), unit, u, lambda_, key));
    return out;
  }

  void set_lambda(double l) { lambda_ = l; }

  void finish() const {
    std::string extra;
    for (const auto& [k, v] : kv_)
      if (used_.count(k) == 0) extra += (extra.empty() ? "" : ", ") + k;
    if (!extra.empty()) throw ConfigError("unknown keys: " + extra);
  }

 private:
  std::map<std::string, std::string> kv_;
  std::set<std::string> used_;
  double lambda_ = 0.0;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v, const char* unit) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt(v[i]);
  }
  if (*unit) {
    out += " ";
    out += unit;
  }
  return out;
}

GeometryShape parse_shape(const std::string& s) {
  if (s == "disk") return GeometryShape::disk;
  if (s == "cylinder") return GeometryShape::cylinder;
  if (s == "random") return GeometryShape::random;
  if (s == "sim-layers") return GeometryShape::sim_layers;
  if (s == "file") return GeometryShape::file;
  throw ConfigError("geometry.shape: unknown shape '" + s + "'");
}

UseCase parse_usecase(const std::string& s) {
  if (s == "beam") return UseCase::beam;
  if (s == "miso") return UseCase::miso;
  if (s == "mimo-precoder") return UseCase::mimo_precoder;
  if (s == "sweep") return UseCase::sweep;
  throw ConfigError("usecase: unknown use case '" + s + "'");
}

}  // namespace

const char* to_string(GeometryShape s) {
  switch (s) {
    case GeometryShape::disk: return "disk";
    case GeometryShape::cylinder: return "cylinder";
    case GeometryShape::random: return "random";
    case GeometryShape::sim_layers: return "sim-layers";
    case GeometryShape::file: return "file";
  }
  return "";
}

const char* to_string(UseCase u) {
  switch (u) {
    case UseCase::beam: return "beam";
    case UseCase::miso: return "miso";
    case UseCase::mimo_precoder: return "mimo-precoder";
    case UseCase::sweep: return "sweep";
  }
  return "";
}

double ScenarioConfig::lambda0() const { return wavelength(frequency.f0); }

ScenarioConfig parse_config(const std::string& text) {
  Cursor cur(text);
  ScenarioConfig c;

  c.frequency.f0 = cur.quantity("frequency.f0", Unit::frequency, 2.4e9);
  if (!(c.frequency.f0 > 0.0)) throw ConfigError("frequency.f0 must be positive");
  const double lambda = wavelength(c.frequency.f0);
  cur.set_lambda(lambda);
  c.frequency.subcarriers = cur.integer("frequency.subcarriers", 1);
  c.frequency.bandwidth = cur.quantity("frequency.bandwidth", Unit::frequency, 0.0);

  c.seed = cur.seed("seed", 1);
  c.usecase = parse_usecase(cur.raw("usecase", "beam"));
  const std::string matching = cur.raw("matching", "simplified");
  if (matching == "perfect") {
    c.matching = MatchingTag::perfect;
  } else if (matching == "simplified") {
    c.matching = MatchingTag::simplified;
  } else {
    throw ConfigError("matching: expected perfect or simplified");
  }
  c.r_chain = cur.quantity("chain_resistance", Unit::resistance, 50.0);

  const std::string rx = cur.raw("receiver.kind", "half-wave");
  if (rx == "half-wave") {
    c.rx_kind = ReceiverKind::half_wave_dipole;
  } else if (rx == "isotropic") {
    c.rx_kind = ReceiverKind::isotropic_effective_length;
  } else {
    throw ConfigError("receiver.kind: expected half-wave or isotropic");
  }
  c.rx_gain_db = cur.quantity("receiver.gain", Unit::gain, 0.0);

  auto& g = c.geometry;
  g.shape = parse_shape(cur.raw("geometry.shape", "disk"));
  g.ring_step = cur.quantity("geometry.ring_step", Unit::distance, lambda / 4.0);
  g.rings = cur.integer("geometry.rings", 5);
  g.stacks = cur.integer("geometry.stacks", 1);
  g.n_active = cur.integer("geometry.n_active", 1);
  g.density = cur.quantity("geometry.density", Unit::plain, 3.0);
  g.disk_radius = cur.quantity("geometry.disk_radius", Unit::distance,
                               g.rings * g.ring_step);
  g.seed = cur.seed("geometry.seed", 0);
  g.path = cur.raw("geometry.path", "");

  auto& b = c.beam;
  b.angles_deg = cur.list("beam.angles", Unit::angle, b.angles_deg);
  b.distance = cur.quantity("beam.distance", Unit::distance, b.distance);
  b.points = cur.integer("beam.points", b.points);
  b.target_rx_power =
      cur.quantity("beam.target_rx_power", Unit::power, b.target_rx_power);
  b.p_tx = cur.quantity("beam.p_tx", Unit::power, b.p_tx);

  auto& mi = c.miso;
  mi.angles_deg = cur.list("miso.angles", Unit::angle, mi.angles_deg);
  mi.distance = cur.quantity("miso.distance", Unit::distance, mi.distance);
  mi.p_tx = cur.quantity("miso.p_tx", Unit::power, mi.p_tx);
  mi.noise_w = cur.list("miso.noise", Unit::power, mi.noise_w);

  auto& mm = c.mimo;
  mm.user_distance =
      cur.quantity("mimo.user_distance", Unit::distance, mm.user_distance);
  mm.rx_elements = cur.integer("mimo.rx_elements", mm.rx_elements);
  mm.rx_spacing =
      cur.quantity("mimo.rx_spacing", Unit::distance, lambda / 2.0);
  mm.scatter_angles_deg =
      cur.list("mimo.scatter_angles", Unit::angle, mm.scatter_angles_deg);
  mm.scatter_distance = cur.quantity("mimo.scatter_distance", Unit::distance,
                                     mm.scatter_distance);
  mm.scatter_gains_db =
      cur.list("mimo.scatter_gains", Unit::gain, mm.scatter_gains_db);
  mm.rank = cur.integer("mimo.rank", mm.rank);
  mm.p_tx = cur.quantity("mimo.p_tx", Unit::power, mm.p_tx);
  mm.noise = cur.quantity("mimo.noise", Unit::power, mm.noise);

  c.sensitivity.sigma_rel = cur.list("sensitivity.sigma_rel", Unit::plain,
                                     c.sensitivity.sigma_rel);
  c.sensitivity.trials = cur.integer("sensitivity.trials", 30);

  c.sweep.axis = cur.raw("sweep.axis", "");
  if (!c.sweep.axis.empty()) {
    const Unit u = c.sweep.axis == "ring_step" ? Unit::distance : Unit::plain;
    c.sweep.values = cur.list("sweep.values", u, {});
  } else if (!cur.raw("sweep.values", "").empty()) {
    throw ConfigError("sweep.values without sweep.axis");
  }

  auto& o = c.optimizer;
  o.n_i = cur.integer("optimizer.iterations", o.n_i);
  o.n_alt = cur.integer("optimizer.alternations", o.n_alt);
  o.fd_step = cur.quantity("optimizer.fd_step", Unit::plain, o.fd_step);
  o.grad_tol = cur.quantity("optimizer.grad_tol", Unit::plain, o.grad_tol);
  o.stall_tol = cur.quantity("optimizer.stall_tol", Unit::plain, o.stall_tol);
  const std::string init = cur.raw("optimizer.init", "random");
  if (init == "random") {
    o.init = OptimizerConfig::Init::random;
  } else if (init == "zero") {
    o.init = OptimizerConfig::Init::zero;
  } else {
    throw ConfigError("optimizer.init: expected random or zero");
  }

  c.out_dir = cur.raw("output.dir", "out");

  cur.finish();
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void ScenarioConfig::validate() const {
  if (!(frequency.f0 > 0.0)) throw ConfigError("frequency.f0 must be positive");
  if (frequency.subcarriers < 1)
    throw ConfigError("frequency.subcarriers must be at least 1");
  if (frequency.bandwidth < 0.0)
    throw ConfigError("frequency.bandwidth must be nonnegative");
  if (frequency.subcarriers > 1 && !(frequency.bandwidth > 0.0))
    throw ConfigError("multiple subcarriers need a positive bandwidth");
  if (!(r_chain > 0.0)) throw ConfigError("chain_resistance must be positive");
  if (geometry.rings < 1) throw ConfigError("geometry.rings must be >= 1");
  if (geometry.stacks < 1) throw ConfigError("geometry.stacks must be >= 1");
  if (geometry.n_active < 1)
    throw ConfigError("geometry.n_active must be >= 1");
  if (!(geometry.ring_step > 0.0))
    throw ConfigError("geometry.ring_step must be positive");
  if (geometry.shape == GeometryShape::random) {
    if (!(geometry.density > 0.0))
      throw ConfigError("geometry.density must be positive");
    if (!(geometry.disk_radius > 0.0))
      throw ConfigError("geometry.disk_radius must be positive");
  }
  if (geometry.shape == GeometryShape::file && geometry.path.empty())
    throw ConfigError("geometry.path required for shape = file");
  if (geometry.shape == GeometryShape::sim_layers && geometry.stacks != 1)
    throw ConfigError("layered runs use a single stack");

  if (beam.angles_deg.empty()) throw ConfigError("beam.angles must be non-empty");
  if (beam.points < 1) throw ConfigError("beam.points must be >= 1");
  if (!(beam.distance > 0.0)) throw ConfigError("beam.distance must be positive");
  if (!(beam.target_rx_power >= 0.0))
    throw ConfigError("beam.target_rx_power must be nonnegative");
  if (!(beam.p_tx > 0.0)) throw ConfigError("beam.p_tx must be positive");

  if (miso.angles_deg.empty()) throw ConfigError("miso.angles must be non-empty");
  if (!(miso.distance > 0.0)) throw ConfigError("miso.distance must be positive");
  if (!(miso.p_tx > 0.0)) throw ConfigError("miso.p_tx must be positive");
  if (miso.noise_w.empty()) throw ConfigError("miso.noise must be non-empty");
  for (double s2 : miso.noise_w)
    if (!(s2 > 0.0)) throw ConfigError("miso.noise entries must be positive");

  if (mimo.rx_elements < 1) throw ConfigError("mimo.rx_elements must be >= 1");
  if (!(mimo.user_distance > 0.0))
    throw ConfigError("mimo.user_distance must be positive");
  if (!(mimo.rx_spacing > 0.0))
    throw ConfigError("mimo.rx_spacing must be positive");
  if (mimo.scatter_angles_deg.size() != mimo.scatter_gains_db.size())
    throw ConfigError("mimo scatterer angle and gain counts differ");
  if (mimo.scatter_angles_deg.empty())
    throw ConfigError("mimo needs at least one channel scatterer");
  if (!(mimo.scatter_distance > 0.0))
    throw ConfigError("mimo.scatter_distance must be positive");
  if (mimo.rank < 1) throw ConfigError("mimo.rank must be >= 1");
  if (mimo.rank > mimo.rx_elements)
    throw ConfigError("mimo.rank exceeds the receiver array size");
  if (usecase == UseCase::mimo_precoder && mimo.rank != geometry.n_active)
    throw ConfigError("mimo.rank must equal geometry.n_active");
  if (!(mimo.p_tx > 0.0)) throw ConfigError("mimo.p_tx must be positive");
  if (!(mimo.noise > 0.0)) throw ConfigError("mimo.noise must be positive");

  for (double s : sensitivity.sigma_rel)
    if (!(s >= 0.0)) throw ConfigError("sensitivity.sigma_rel must be >= 0");
  if (sensitivity.trials < 1)
    throw ConfigError("sensitivity.trials must be >= 1");

  if (usecase == UseCase::sweep) {
    static const std::set<std::string> axes{"ring_step", "rings", "stacks",
                                            "sigma_rel", "noise"};
    if (axes.count(sweep.axis) == 0)
      throw ConfigError("sweep.axis must be one of ring_step, rings, stacks, "
                        "sigma_rel, noise");
    if (sweep.values.empty()) throw ConfigError("sweep.values must be non-empty");
  }

  optimizer.validate();
  dsa::validate(varactor);
}

std::string echo_config(const ScenarioConfig& c) {
  std::ostringstream out;
  out << "seed = " << c.seed << "\n";
  out << "usecase = " << to_string(c.usecase) << "\n";
  out << "matching = "
      << (c.matching == MatchingTag::perfect ? "perfect" : "simplified")
      << "\n";
  out << "chain_resistance = " << fmt(c.r_chain) << " ohm\n";
  out << "receiver.kind = "
      << (c.rx_kind == ReceiverKind::half_wave_dipole ? "half-wave"
                                                      : "isotropic")
      << "\n";
  out << "receiver.gain = " << fmt(c.rx_gain_db) << " dB\n";
  out << "frequency.f0 = " << fmt(c.frequency.f0 / 1e9) << " GHz\n";
  out << "frequency.subcarriers = " << c.frequency.subcarriers << "\n";
  out << "frequency.bandwidth = " << fmt(c.frequency.bandwidth / 1e9)
      << " GHz\n";
  out << "geometry.shape = " << to_string(c.geometry.shape) << "\n";
  out << "geometry.ring_step = " << fmt(c.geometry.ring_step) << " m\n";
  out << "geometry.rings = " << c.geometry.rings << "\n";
  out << "geometry.stacks = " << c.geometry.stacks << "\n";
  out << "geometry.n_active = " << c.geometry.n_active << "\n";
  if (c.geometry.shape == GeometryShape::random) {
    out << "geometry.density = " << fmt(c.geometry.density) << "\n";
    out << "geometry.disk_radius = " << fmt(c.geometry.disk_radius) << " m\n";
  }
  out << "geometry.seed = " << c.geometry.seed << "\n";
  if (c.geometry.shape == GeometryShape::file)
    out << "geometry.path = " << c.geometry.path << "\n";

  const bool sweeping = c.usecase == UseCase::sweep;
  const bool beam_like =
      c.usecase == UseCase::beam ||
      (sweeping && c.sweep.axis != "noise");
  if (beam_like) {
    out << "beam.angles = " << fmt_list(c.beam.angles_deg, "deg") << "\n";
    out << "beam.distance = " << fmt(c.beam.distance) << " m\n";
    out << "beam.points = " << c.beam.points << "\n";
    out << "beam.target_rx_power = " << fmt(c.beam.target_rx_power) << " W\n";
    out << "beam.p_tx = " << fmt(c.beam.p_tx) << " W\n";
  }
  if (c.usecase == UseCase::miso || (sweeping && c.sweep.axis == "noise")) {
    out << "miso.angles = " << fmt_list(c.miso.angles_deg, "deg") << "\n";
    out << "miso.distance = " << fmt(c.miso.distance) << " m\n";
    out << "miso.p_tx = " << fmt(c.miso.p_tx) << " W\n";
    out << "miso.noise = " << fmt_list(c.miso.noise_w, "W") << "\n";
  }
  if (c.usecase == UseCase::mimo_precoder) {
    out << "mimo.user_distance = " << fmt(c.mimo.user_distance) << " m\n";
    out << "mimo.rx_elements = " << c.mimo.rx_elements << "\n";
    out << "mimo.rx_spacing = " << fmt(c.mimo.rx_spacing) << " m\n";
    out << "mimo.scatter_angles = "
        << fmt_list(c.mimo.scatter_angles_deg, "deg") << "\n";
    out << "mimo.scatter_distance = " << fmt(c.mimo.scatter_distance)
        << " m\n";
    out << "mimo.scatter_gains = " << fmt_list(c.mimo.scatter_gains_db, "dB")
        << "\n";
    out << "mimo.rank = " << c.mimo.rank << "\n";
    out << "mimo.p_tx = " << fmt(c.mimo.p_tx) << " W\n";
    out << "mimo.noise = " << fmt(c.mimo.noise) << " W\n";
  }
  if (!c.sensitivity.sigma_rel.empty())
    out << "sensitivity.sigma_rel = " << fmt_list(c.sensitivity.sigma_rel, "")
        << "\n";
  out << "sensitivity.trials = " << c.sensitivity.trials << "\n";
  if (sweeping) {
    out << "sweep.axis = " << c.sweep.axis << "\n";
    const char* unit = c.sweep.axis == "ring_step" ? "m" : "";
    out << "sweep.values = " << fmt_list(c.sweep.values, unit) << "\n";
  }
  out << "optimizer.iterations = " << c.optimizer.n_i << "\n";
  out << "optimizer.alternations = " << c.optimizer.n_alt << "\n";
  out << "optimizer.fd_step = " << fmt(c.optimizer.fd_step) << "\n";
  out << "optimizer.grad_tol = " << fmt(c.optimizer.grad_tol) << "\n";
  out << "optimizer.stall_tol = " << fmt(c.optimizer.stall_tol) << "\n";
  out << "optimizer.init = "
      << (c.optimizer.init == OptimizerConfig::Init::zero ? "zero" : "random")
      << "\n";
  out << "output.dir = " << c.out_dir << "\n";
  return out.str();
}

}  // namespace dsa
