// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "hdwv/rng.hpp"

namespace hdwv {

/*!
 * Multi-level RRAM cell parameters. Conductances in microsiemens.
 *
 * Step sizes are expressed in fractions of one conductance LSB. Variation
 * magnitudes (c2c, d2d) and the saturation coefficient are model
 * placeholders; only g_max, the fine step and the mapping sigma come from
 * measured characterizations.
 */
struct DeviceParams {
  double g_min = 0.0;
  double g_max = 13.0;
  int bits_per_cell = 3;
  double fine_step_lsb = 0.25;
  int coarse_steps_per_pulse = 5;
  double sigma_map_rel = 0.10;  // per-phase programming error, sigma / g_max
  double d2d_sigma_rel = 0.1;   // static per-cell step gain spread
  double c2c_sigma_rel = 0.3;   // per-pulse step spread
  double nonlinearity = 1.0;    // saturation coefficient, 0 = linear

  // Pulse metadata, reported only.
  double fine_pulse_v = 2.0;
  double coarse_pulse_v = 4.0;
  double pulse_width_ns = 100.0;
  double supply_v = 0.9;

  int max_level() const noexcept { return (1 << bits_per_cell) - 1; }
  /// One conductance LSB.
  double lsb() const noexcept { return (g_max - g_min) / max_level(); }
  double fine_step() const noexcept { return fine_step_lsb * lsb(); }
  double coarse_step() const noexcept { return coarse_steps_per_pulse * fine_step_lsb * lsb(); }

  void validate() const;
};

/// Target conductance of a slice level: g_min + level * LSB.
double level_to_conductance(const DeviceParams& p, int level);

/// Unrounded level of a conductance: (g - g_min) / LSB.
inline double conductance_to_level(const DeviceParams& p, double g) { return (g - p.g_min) / p.lsb(); }

enum class PulseDirection { Set, Reset };
enum class PulseMode { Coarse, Fine };

struct PulseTarget {
  int row;
  int col;
  PulseDirection direction;
  int pulse_count;
};

/*!
 * Grid of RRAM cells together with their static device-to-device step gain.
 *
 * Every cell starts at HRS (g_min). Conductances are clipped to
 * [g_min, g_max] after every pulse.
 */
class CellArray {
 public:
  CellArray(int rows, int cols, const DeviceParams& params, std::uint64_t seed);

  int rows() const noexcept { return static_cast<int>(g_.rows()); }
  int cols() const noexcept { return static_cast<int>(g_.cols()); }
  const DeviceParams& params() const noexcept { return params_; }

  const Eigen::MatrixXd& conductance() const noexcept { return g_; }
  const Eigen::MatrixXd& d2d_gain() const noexcept { return d2d_; }
  const Eigen::MatrixXi& set_pulses() const noexcept { return set_pulses_; }
  const Eigen::MatrixXi& reset_pulses() const noexcept { return reset_pulses_; }

  double conductance(int r, int c) const { return g_(r, c); }
  /// Cell state in LSB units, (g - g_min) / LSB.
  double level(int r, int c) const { return conductance_to_level(params_, g_(r, c)); }

  /// Direct state override; clipped. Used by tests and calibration tools.
  void set_conductance(int r, int c, double g);

  /*!
   * Apply one write phase. Each target receives its pulse train, followed by
   * a single mapping perturbation N(0, (sigma_map_rel * g_max)^2).
   */
  void apply_pulses(std::span<const PulseTarget> targets, PulseMode mode, Engine& rng);

 private:
  double shape(double g, PulseDirection dir) const;
  double clip(double g) const;

  DeviceParams params_;
  Eigen::MatrixXd g_;
  Eigen::MatrixXd d2d_;
  Eigen::MatrixXi set_pulses_;
  Eigen::MatrixXi reset_pulses_;
};

inline CellArray new_array(int rows, int cols, const DeviceParams& params, std::uint64_t seed) {
  return CellArray(rows, cols, params, seed);
}

}  // namespace hdwv
