// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#include "hdwv/read_channel.hpp"

#include <string>

#include "hdwv/error.hpp"

namespace hdwv {

void NoiseParams::validate() const {
  if (!(sigma_total_lsb >= 0.0)) throw Error(ErrorCode::ConfigInconsistent, "read noise must be >= 0");
  if (!(rho >= 0.0 && rho <= 1.0)) throw Error(ErrorCode::ConfigInconsistent, "rho must be in [0, 1]");
}

SweepContext begin_sweep(int column, const NoiseParams& noise, Engine& rng) {
  // Always consume one draw so the stream layout does not depend on rho.
  const double z = standard_normal(rng);
  return {column, noise.sigma_cm() * z};
}

Eigen::VectorXd column_levels(const CellArray& array, ColumnRef col) {
  if (col.pos < 0 || col.pos >= array.cols() || col.neg >= array.cols())
    throw Error(ErrorCode::IndexOutOfRange, "column " + std::to_string(col.pos));
  const auto& p = array.params();
  Eigen::VectorXd w = (array.conductance().col(col.pos).array() - p.g_min) / p.lsb();
  if (col.is_pair()) w -= ((array.conductance().col(col.neg).array() - p.g_min) / p.lsb()).matrix();
  return w;
}

double read_pattern(const CellArray& array, ColumnRef col, const Eigen::Ref<const Eigen::VectorXi>& pattern,
                    const SweepContext& ctx, const NoiseParams& noise, Engine& rng) {
  if (pattern.size() != array.rows())
    throw Error(ErrorCode::DimensionMismatch, "pattern length " + std::to_string(pattern.size()) +
                                                  " vs column length " + std::to_string(array.rows()));
  const double signal = pattern.cast<double>().dot(column_levels(array, col));
  return signal + noise.sigma_uc() * standard_normal(rng) + ctx.mu_cm;
}

}  // namespace hdwv
