// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#include "hdwv/device.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hdwv/error.hpp"

namespace hdwv {

void DeviceParams::validate() const {
  if (!(g_min >= 0.0 && g_min < g_max))
    throw Error(ErrorCode::ConfigInconsistent, "device requires 0 <= g_min < g_max");
  if (bits_per_cell < 1 || bits_per_cell > 8)
    throw Error(ErrorCode::ConfigInconsistent, "bits_per_cell must be in [1, 8]");
  if (fine_step_lsb <= 0.0 || coarse_steps_per_pulse < 1)
    throw Error(ErrorCode::ConfigInconsistent, "pulse step sizes must be positive");
  if (sigma_map_rel < 0.0 || d2d_sigma_rel < 0.0 || c2c_sigma_rel < 0.0 || nonlinearity < 0.0)
    throw Error(ErrorCode::ConfigInconsistent, "variation parameters must be non-negative");
}

double level_to_conductance(const DeviceParams& p, int level) {
  if (level < 0 || level > p.max_level())
    throw Error(ErrorCode::LevelOutOfRange,
                "level " + std::to_string(level) + " outside [0, " + std::to_string(p.max_level()) + "]");
  return p.g_min + level * p.lsb();
}

CellArray::CellArray(int rows, int cols, const DeviceParams& params, std::uint64_t seed)
    : params_(params) {
  if (rows < 1 || cols < 1)
    throw Error(ErrorCode::InvalidDimensions,
                std::to_string(rows) + "x" + std::to_string(cols) + " array");
  params_.validate();
  g_ = Eigen::MatrixXd::Constant(rows, cols, params_.g_min);
  set_pulses_ = Eigen::MatrixXi::Zero(rows, cols);
  reset_pulses_ = Eigen::MatrixXi::Zero(rows, cols);
  d2d_.resize(rows, cols);
  Engine rng = make_engine(seed, {stream::kDevice});
  // Column-major fill keeps the draw order independent of Eigen storage flags.
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r)
      d2d_(r, c) = std::max(0.1, 1.0 + params_.d2d_sigma_rel * standard_normal(rng));
}

double CellArray::clip(double g) const { return std::clamp(g, params_.g_min, params_.g_max); }

void CellArray::set_conductance(int r, int c, double g) {
  if (r < 0 || r >= rows() || c < 0 || c >= cols())
    throw Error(ErrorCode::IndexOutOfRange, "cell (" + std::to_string(r) + "," + std::to_string(c) + ")");
  g_(r, c) = clip(g);
}

double CellArray::shape(double g, PulseDirection dir) const {
  const double span = params_.g_max - params_.g_min;
  const double x = dir == PulseDirection::Set ? (g - params_.g_min) / span : (params_.g_max - g) / span;
  return std::exp(-params_.nonlinearity * x);
}

void CellArray::apply_pulses(std::span<const PulseTarget> targets, PulseMode mode, Engine& rng) {
  for (const auto& t : targets) {
    if (t.row < 0 || t.row >= rows() || t.col < 0 || t.col >= cols())
      throw Error(ErrorCode::IndexOutOfRange,
                  "cell (" + std::to_string(t.row) + "," + std::to_string(t.col) + ")");
    if (mode == PulseMode::Coarse && t.direction == PulseDirection::Reset)
      throw Error(ErrorCode::CoarseResetForbidden, "coarse pulses are SET-only");
    if (t.pulse_count < 1)
      throw Error(ErrorCode::IndexOutOfRange, "pulse_count must be >= 1");
  }

  const double step = mode == PulseMode::Fine ? params_.fine_step() : params_.coarse_step();
  const double sigma_map = params_.sigma_map_rel * params_.g_max;
  for (const auto& t : targets) {
    const double sign = t.direction == PulseDirection::Set ? 1.0 : -1.0;
    double g = g_(t.row, t.col);
    const double gain = d2d_(t.row, t.col);
    for (int p = 0; p < t.pulse_count; ++p) {
      const double c2c = 1.0 + params_.c2c_sigma_rel * standard_normal(rng);
      g = clip(g + sign * step * gain * c2c * shape(g, t.direction));
    }
    if (sigma_map > 0.0) g = clip(g + sigma_map * standard_normal(rng));
    g_(t.row, t.col) = g;
    auto& tally = t.direction == PulseDirection::Set ? set_pulses_ : reset_pulses_;
    tally(t.row, t.col) += t.pulse_count;
  }
}

}  // namespace hdwv
