// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "hdwv/device.hpp"
#include "hdwv/rng.hpp"

namespace hdwv {

/// How the common-mode offset evolves across sweeps of one column.
enum class CommonModeMode { PerSweep, PerColumnStatic };

/*!
 * Read noise in LSB units, split into an uncorrelated part (fresh per read)
 * and a common-mode part shared by every read of one sweep.
 */
struct NoiseParams {
  double sigma_total_lsb = 0.7;
  double rho = 0.0;  // common-mode power fraction
  CommonModeMode cm_mode = CommonModeMode::PerSweep;

  double sigma_uc() const { return sigma_total_lsb * std::sqrt(1.0 - rho); }
  double sigma_cm() const { return sigma_total_lsb * std::sqrt(rho); }
  void validate() const;
};

/// State that is constant across the N reads of one verify sweep.
struct SweepContext {
  int column = 0;
  double mu_cm = 0.0;
};

/// Draw the common-mode offset for a fresh sweep of `column`.
SweepContext begin_sweep(int column, const NoiseParams& noise, Engine& rng);

/*!
 * Physical columns observed together. With neg >= 0 the pair is read as one
 * signed column (w+ - w-), both bitlines driven by the same pattern entry.
 */
struct ColumnRef {
  int pos = 0;
  int neg = -1;

  bool is_pair() const noexcept { return neg >= 0; }
};

/// Noiseless column state in LSB units (signed for pairs).
Eigen::VectorXd column_levels(const CellArray& array, ColumnRef col);

/// One analog observation a^T w + n_uc + mu_cm, in LSB units.
double read_pattern(const CellArray& array, ColumnRef col, const Eigen::Ref<const Eigen::VectorXi>& pattern,
                    const SweepContext& ctx, const NoiseParams& noise, Engine& rng);

}  // namespace hdwv

namespace hdwv {

/// Same as read_pattern, against precomputed column levels.
inline double observe(const Eigen::VectorXd& levels, const Eigen::Ref<const Eigen::VectorXi>& pattern,
                      const SweepContext& ctx, const NoiseParams& noise, Engine& rng) {
  return pattern.cast<double>().dot(levels) + noise.sigma_uc() * standard_normal(rng) + ctx.mu_cm;
}

}  // namespace hdwv
