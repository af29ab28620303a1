// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "hdwv/cost_model.hpp"

namespace hdwv {

/// Ground digitizes [0, 2^n - 1]; HalfVcm shifts the window to [-2^(n-1), 2^(n-1) - 1].
enum class SamplingRef { Ground, HalfVcm };

struct AdcConfig {
  int resolution = 9;
  SamplingRef sampling_ref = SamplingRef::HalfVcm;
  double full_scale_lsb = 1.0;  // ADC LSB in read-channel LSB units

  int min_code() const noexcept { return sampling_ref == SamplingRef::Ground ? 0 : -(1 << (resolution - 1)); }
  int max_code() const noexcept {
    return sampling_ref == SamplingRef::Ground ? (1 << resolution) - 1 : (1 << (resolution - 1)) - 1;
  }
  AdcConfig with_ref(SamplingRef ref) const {
    AdcConfig c = *this;
    c.sampling_ref = ref;
    return c;
  }
};

enum class Comparison { Low, Equal, High };

struct CompareOutcome {
  Comparison outcome;
  int comparisons_used;
};

/// Full n-step SAR conversion: round half away from zero, clamped to the code window.
int convert(double v, const AdcConfig& cfg, CostLedger& ledger);

/*!
 * One-shot target comparison. The capacitor array is preset to target_code;
 * the first comparison checks the lower boundary (target - 1/2), the second
 * the upper one (target + 1/2). Inputs exactly on a boundary are Equal.
 */
CompareOutcome compare_to_target(double v, int target_code, const AdcConfig& cfg, CostLedger& ledger);

/// Smallest resolution whose signed window holds +-max_abs_code.
int min_signed_resolution(int max_abs_code);

}  // namespace hdwv
