// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hdwv/cost_model.hpp"
#include "hdwv/device.hpp"
#include "hdwv/hadamard.hpp"
#include "hdwv/read_channel.hpp"
#include "hdwv/sar_adc.hpp"
#include "hdwv/scheme.hpp"

namespace hdwv {

enum class CellDecision { Set, Reset, Stop };

/// RESET above target + threshold, SET below target - threshold, STOP otherwise.
CellDecision decide(double estimate_lsb, double target_lsb, double threshold);

/*!
 * Write-and-verify configuration: precision, scheme parameters and the
 * device, read-noise and cost models.
 */
struct WvConfig {
  Scheme scheme = Scheme::hdpv();
  int n = 32;        // cells per column
  int b = 6;         // weight bits (signed magnitude)
  int b_c = 3;       // bits per cell
  int k_streak = 2;  // consecutive STOP verdicts before freezing
  int tau_w = 4;     // compare-only Hadamard threshold, unnormalized scale
  double decision_threshold_lsb = 0.5;
  int max_fine_iters = 50;
  int max_coarse_iters = 10;
  int max_pulses_per_iter = 8;
  NoiseParams noise{};
  int adc_bits = 0;  // 0 selects the smallest resolution that holds N * max_level
  DeviceParams device{};
  std::optional<CostParams> cost;  // defaults to CostParams::for_resolution(adc bits)
  std::uint64_t seed = 1;

  int slices() const noexcept { return b / b_c; }
  int max_code() const noexcept { return (1 << (b - 1)) - 1; }
  int resolution() const;
  AdcConfig adc() const;
  CostParams cost_params() const;
  void validate() const;
};

/// Column under verification and the per-cell reference each decision is made against.
struct VerifyRequest {
  ColumnRef column;
  Eigen::VectorXi targets;     // signed levels, LSB
  Eigen::VectorXd thresholds;  // magnitude-scheme decision band per cell

  static VerifyRequest uniform(ColumnRef col, Eigen::VectorXi targets, double threshold);
};

struct SweepResult {
  std::vector<CellDecision> decisions;
  /// Digitized per-cell estimates; empty for compare-only schemes.
  Eigen::VectorXd estimate;

  bool has_magnitude() const noexcept { return estimate.size() > 0; }
};

/// Sampling reference used for row `row` of a Hadamard read.
SamplingRef sampling_ref_for_row(int row, bool signed_pair);

SweepResult verify_sweep_cwsc(const CellArray& array, const VerifyRequest& req, const WvConfig& cfg,
                              const SweepContext& ctx, CostLedger& ledger, Engine& rng);
SweepResult verify_sweep_multiread(const CellArray& array, const VerifyRequest& req, int m, const WvConfig& cfg,
                                   const SweepContext& ctx, CostLedger& ledger, Engine& rng);
SweepResult verify_sweep_hdpv(const CellArray& array, const VerifyRequest& req, const HadamardMatrix& h,
                              const WvConfig& cfg, const SweepContext& ctx, CostLedger& ledger, Engine& rng);
SweepResult verify_sweep_harp(const CellArray& array, const VerifyRequest& req, const HadamardMatrix& h,
                              const WvConfig& cfg, const SweepContext& ctx, CostLedger& ledger, Engine& rng);

/// Dispatch on cfg.scheme. h is required for Hadamard schemes.
SweepResult verify_sweep(const CellArray& array, const VerifyRequest& req, const HadamardMatrix* h,
                         const WvConfig& cfg, const SweepContext& ctx, CostLedger& ledger, Engine& rng);

/// Consecutive-STOP counter; freezes permanently once the streak reaches K.
class StreakCounter {
 public:
  explicit StreakCounter(int k) : k_(k) {}

  /// Returns true when this verdict freezes the cell.
  bool update(CellDecision d) {
    if (frozen_) return false;
    streak_ = d == CellDecision::Stop ? streak_ + 1 : 0;
    frozen_ = streak_ >= k_;
    return frozen_;
  }
  void freeze() { frozen_ = true; }
  bool frozen() const noexcept { return frozen_; }
  int streak() const noexcept { return streak_; }

 private:
  int k_;
  int streak_ = 0;
  bool frozen_ = false;
};

struct IterationRecord {
  int iteration;
  double mean_abs_cell_error_lsb;
  int frozen_cells;
  double cumulative_ns;
  double cumulative_pj;
};

struct WvResult {
  Eigen::MatrixXd final_conductances;
  Eigen::MatrixXd cell_error_lsb;    // N x k, signed pair level minus target level
  Eigen::VectorXd weight_error_lsb;  // per weight, slice errors recombined with 2^(l*B_C)
  double rms_cell_lsb = 0.0;
  double rms_weight_lsb = 0.0;
  int iterations_used = 0;
  Eigen::MatrixXi freeze_trace;  // iteration at which each cell froze, -1 if never
  CostLedger cost;
  bool converged = false;
  std::vector<IterationRecord> trace;
};

/// Column index of slice l's positive / negative column inside a weight column group.
inline ColumnRef slice_pair(int l) { return {2 * l, 2 * l + 1}; }

/// Signed slice levels (N x k) of a vector of weight codes.
Eigen::MatrixXi signed_slice_targets(const Eigen::VectorXi& codes, int b, int b_c);

/*!
 * Program one weight column group: k = B/B_C signed column pairs holding the
 * slices of N weights, laid out as columns (2l, 2l+1) of `group`.
 *
 * All slice pairs are verified and written in lock-step; one iteration is one
 * verify sweep of every pair followed by its write phases; fully frozen pairs
 * are no longer read. Nonzero cells get an open-loop coarse shot from HRS,
 * verified coarse SET staging, then the fine loop until every cell is frozen
 * or the iteration budget is spent.
 */
WvResult run_wv(CellArray& group, const Eigen::VectorXi& target_codes, const WvConfig& cfg);

}  // namespace hdwv
