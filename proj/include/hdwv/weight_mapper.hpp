// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "hdwv/device.hpp"
#include "hdwv/wv_engine.hpp"

namespace hdwv {

/// Row-major dense tensor of real weights.
struct WeightTensor {
  std::vector<std::int64_t> shape;
  Eigen::VectorXd values;

  std::int64_t size() const;
  bool operator==(const WeightTensor& o) const { return shape == o.shape && values == o.values; }
};

struct Quantized {
  Eigen::VectorXi codes;
  double scale = 1.0;  // real weight per integer code
  bool all_zero = false;
};

/*!
 * Symmetric per-tensor quantization to B-bit signed codes in
 * [-(2^(B-1)-1), 2^(B-1)-1], rounding half away from zero.
 *
 * An all-zero tensor has no defined scale; it maps to scale 1 and zero codes
 * with `all_zero` set. Throws InvalidDimensions for an empty tensor and
 * ConfigInconsistent for B < 2.
 */
Quantized quantize(const Eigen::VectorXd& weights, int b);
Eigen::VectorXd dequantize(const Eigen::VectorXi& codes, double scale);

/// Base-2^B_C digits of |code|, least significant first. Throws CodeOutOfRange.
std::vector<int> slice_code(int code, int b, int b_c);
/// Inverse of slice_code for a given sign.
int recombine(const std::vector<int>& slices, int b_c, int sign = 1);

/// Where a weight lives: column group (N x 2k cells) and row inside it.
struct CellSlot {
  int group = 0;
  int row = 0;
};

/*!
 * Tensor mapped onto column groups. Weights fill groups row-major, N per
 * group; the tail of the last group is padded with zero weights.
 */
struct MappedTensor {
  std::vector<std::int64_t> shape;
  int b = 6;
  int b_c = 3;
  int n = 32;
  double scale = 1.0;
  Eigen::VectorXi codes;  // one per weight, tensor order

  int slices() const noexcept { return b / b_c; }
  int groups() const;
  CellSlot slot(std::int64_t index) const;
  std::int64_t index(const CellSlot& s) const;
  /// Target codes of one group, zero padded to N.
  Eigen::VectorXi group_codes(int group) const;
};

MappedTensor map_tensor(const WeightTensor& tensor, const WvConfig& cfg);

struct ProgramResult {
  MappedTensor mapping;
  std::vector<CellArray> arrays;  // one per group
  std::vector<WvResult> columns;  // one per group
  CostLedger cost;                // sum over groups
};

/*!
 * Quantize, map and program a tensor. Group g uses device and write-verify
 * seeds derived from (cfg.seed, g), so groups are independent of each other
 * and of execution order. Throws ConfigInconsistent for an invalid cfg.
 */
ProgramResult program_tensor(const WeightTensor& tensor, const WvConfig& cfg);

/*!
 * Noiseless reconstruction of the programmed weights: per weight,
 * scale * sum_l 2^(l*B_C) * (level+ - level-) with unrounded levels.
 */
WeightTensor readback_effective(const std::vector<CellArray>& arrays, const MappedTensor& mapping);

}  // namespace hdwv
