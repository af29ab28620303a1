// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#include "hdwv/weight_mapper.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hdwv/error.hpp"
#include "hdwv/rng.hpp"

namespace hdwv {

std::int64_t WeightTensor::size() const {
  std::int64_t s = 1;
  for (auto d : shape) s *= d;
  return s;
}

Quantized quantize(const Eigen::VectorXd& weights, int b) {
  if (weights.size() == 0) throw Error(ErrorCode::InvalidDimensions, "cannot quantize an empty tensor");
  if (b < 2 || b > 31) throw Error(ErrorCode::ConfigInconsistent, "B must be in [2, 31]");
  const int max_code = (1 << (b - 1)) - 1;
  const double peak = weights.cwiseAbs().maxCoeff();
  Quantized q;
  if (peak == 0.0) {
    q.codes = Eigen::VectorXi::Zero(weights.size());
    q.all_zero = true;
    return q;
  }
  q.scale = peak / max_code;
  q.codes.resize(weights.size());
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    // std::round is half away from zero.
    const long c = std::lround(weights[i] / q.scale);
    q.codes[i] = static_cast<int>(std::clamp<long>(c, -max_code, max_code));
  }
  return q;
}

Eigen::VectorXd dequantize(const Eigen::VectorXi& codes, double scale) { return codes.cast<double>() * scale; }

std::vector<int> slice_code(int code, int b, int b_c) {
  if (b_c < 1 || b % b_c != 0) throw Error(ErrorCode::ConfigInconsistent, "B must be a multiple of B_C");
  const int max_code = (1 << (b - 1)) - 1;
  if (code < -max_code || code > max_code)
    throw Error(ErrorCode::CodeOutOfRange, "code " + std::to_string(code) + " outside B-bit signed range");
  std::vector<int> out(b / b_c);
  int mag = std::abs(code);
  const int mask = (1 << b_c) - 1;
  for (auto& s : out) {
    s = mag & mask;
    mag >>= b_c;
  }
  return out;
}

int recombine(const std::vector<int>& slices, int b_c, int sign) {
  int mag = 0;
  for (std::size_t l = slices.size(); l-- > 0;) mag = (mag << b_c) + slices[l];
  return sign < 0 ? -mag : mag;
}

int MappedTensor::groups() const {
  return static_cast<int>((codes.size() + n - 1) / n);
}

CellSlot MappedTensor::slot(std::int64_t i) const {
  if (i < 0 || i >= codes.size()) throw Error(ErrorCode::IndexOutOfRange, "weight index out of range");
  return {static_cast<int>(i / n), static_cast<int>(i % n)};
}

std::int64_t MappedTensor::index(const CellSlot& s) const { return static_cast<std::int64_t>(s.group) * n + s.row; }

Eigen::VectorXi MappedTensor::group_codes(int group) const {
  if (group < 0 || group >= groups()) throw Error(ErrorCode::IndexOutOfRange, "group out of range");
  Eigen::VectorXi out = Eigen::VectorXi::Zero(n);
  const std::int64_t first = static_cast<std::int64_t>(group) * n;
  const std::int64_t count = std::min<std::int64_t>(n, codes.size() - first);
  out.head(count) = codes.segment(first, count);
  return out;
}

MappedTensor map_tensor(const WeightTensor& tensor, const WvConfig& cfg) {
  if (tensor.size() != tensor.values.size())
    throw Error(ErrorCode::DimensionMismatch, "tensor shape does not match its value count");
  const Quantized q = quantize(tensor.values, cfg.b);
  MappedTensor m;
  m.shape = tensor.shape;
  m.b = cfg.b;
  m.b_c = cfg.b_c;
  m.n = cfg.n;
  m.scale = q.scale;
  m.codes = q.codes;
  return m;
}

ProgramResult program_tensor(const WeightTensor& tensor, const WvConfig& cfg) {
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigInconsistent, e.what());
  }
  ProgramResult out;
  out.mapping = map_tensor(tensor, cfg);
  out.cost = CostLedger(cfg.cost_params());
  const int groups = out.mapping.groups();
  out.arrays.reserve(groups);
  out.columns.reserve(groups);
  for (int g = 0; g < groups; ++g) {
    WvConfig gcfg = cfg;
    gcfg.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(g)});
    out.arrays.emplace_back(cfg.n, 2 * cfg.slices(), cfg.device, gcfg.seed);
    out.columns.push_back(run_wv(out.arrays.back(), out.mapping.group_codes(g), gcfg));
    out.cost += out.columns.back().cost;
  }
  return out;
}

WeightTensor readback_effective(const std::vector<CellArray>& arrays, const MappedTensor& mapping) {
  if (static_cast<int>(arrays.size()) != mapping.groups())
    throw Error(ErrorCode::DimensionMismatch, "one array per column group expected");
  WeightTensor out;
  out.shape = mapping.shape;
  out.values.resize(mapping.codes.size());
  for (Eigen::Index i = 0; i < mapping.codes.size(); ++i) {
    const CellSlot s = mapping.slot(i);
    const CellArray& a = arrays[s.group];
    double w = 0.0;
    for (int l = 0; l < mapping.slices(); ++l) {
      const ColumnRef col = slice_pair(l);
      w += std::ldexp(a.level(s.row, col.pos) - a.level(s.row, col.neg), l * mapping.b_c);
    }
    out.values[i] = w * mapping.scale;
  }
  return out;
}

}  // namespace hdwv
