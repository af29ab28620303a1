// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#include "hdwv/sar_adc.hpp"

#include <cmath>
#include <string>

#include "hdwv/error.hpp"

namespace hdwv {

int convert(double v, const AdcConfig& cfg, CostLedger& ledger) {
  const double x = v / cfg.full_scale_lsb;
  const double r = std::round(x);  // half away from zero
  int code;
  if (r < cfg.min_code()) {
    code = cfg.min_code();
    ledger.note_saturation();
  } else if (r > cfg.max_code()) {
    code = cfg.max_code();
    ledger.note_saturation();
  } else {
    code = static_cast<int>(r);
  }
  ledger.charge({EventKind::SarConvert, 1});
  return code;
}

CompareOutcome compare_to_target(double v, int target_code, const AdcConfig& cfg, CostLedger& ledger) {
  if (target_code < cfg.min_code() || target_code > cfg.max_code())
    throw Error(ErrorCode::TargetOutOfRange,
                "target code " + std::to_string(target_code) + " outside [" + std::to_string(cfg.min_code()) +
                    ", " + std::to_string(cfg.max_code()) + "]");
  const double x = v / cfg.full_scale_lsb;
  CompareOutcome out{Comparison::Equal, 2};
  if (x < target_code - 0.5) {
    out = {Comparison::Low, 1};
  } else if (x > target_code + 0.5) {
    out = {Comparison::High, 2};
  }
  ledger.charge({EventKind::Compare, out.comparisons_used});
  return out;
}

int min_signed_resolution(int max_abs_code) {
  int bits = 1;
  while ((1 << (bits - 1)) - 1 < max_abs_code) ++bits;
  return bits;
}

}  // namespace hdwv
