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

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dsa {

using Cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;

inline constexpr double kSpeedOfLight = 299792458.0;          // m/s
inline constexpr double kFreeSpaceImpedance = 376.730313668;  // ohm
inline constexpr double kPi = 3.14159265358979323846;

// Base class for all library errors. Subclasses identify the failing module
// so callers (and the CLI exit-code contract) can name the error source.
class DsaError : public std::runtime_error {
 public:
  explicit DsaError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid element placement, overlapping dipoles, non-parallel orientations.
class GeometryError : public DsaError {
 public:
  explicit GeometryError(const std::string& msg) : DsaError("geometry: " + msg) {}
};

// Singular or ill-conditioned network algebra (e.g. Z_ss + Z_S not invertible).
class NetworkError : public DsaError {
 public:
  explicit NetworkError(const std::string& msg) : DsaError("network: " + msg) {}
};

// Re{Z_A} indefinite beyond the eigenvalue floor.
class PassivityError : public DsaError {
 public:
  explicit PassivityError(const std::string& msg) : DsaError("passivity: " + msg) {}
};

// Radiated power is zero or negative where a positive value is required.
class DegenerateRadiatorError : public DsaError {
 public:
  explicit DegenerateRadiatorError(const std::string& msg)
      : DsaError("radiator: " + msg) {}
};

// Scenario configuration parse or validation failure.
class ConfigError : public DsaError {
 public:
  explicit ConfigError(const std::string& msg) : DsaError("config: " + msg) {}
};

// File input/output failure.
class IoError : public DsaError {
 public:
  explicit IoError(const std::string& msg) : DsaError("io: " + msg) {}
};

inline double wavelength(double f_hz) { return kSpeedOfLight / f_hz; }
inline double wavenumber(double f_hz) { return 2.0 * kPi / wavelength(f_hz); }

inline double db10(double x) { return 10.0 * std::log10(x); }
inline double db20(double x) { return 20.0 * std::log10(x); }
inline double from_db10(double x) { return std::pow(10.0, x / 10.0); }

}  // namespace dsa
