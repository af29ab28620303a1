// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "hdwv/scheme.hpp"

namespace hdwv {

/*!
 * Latency (ns) and energy (pJ) constants for one ADC resolution.
 *
 * Defaults come from for_resolution(): latency and TIA energy interpolate
 * linearly over 8..10 bits, SAR capacitor-array energy interpolates
 * geometrically (DAC size doubles per bit).
 */
struct CostParams {
  double read_pulse_ns = 32.0;
  double sar_latency_ns = 47.5;
  double compare_latency_ns = 30.0;
  double tia_energy_pj = 2.07;
  double sar_energy_pj = 7.589466384404110;
  double compare_energy_pj = 0.2 * 7.589466384404110;  // per comparison
  double write_pulse_ns = 100.0;
  double write_pulse_energy_pj = 0.0;
  double ih_decode_latency_ns = 5.0;
  double ih_decode_energy_hdpv_pj = 0.9;
  double ih_decode_energy_harp_pj = 0.2;

  static CostParams for_resolution(int bits);
  void validate() const;
};

enum class EventKind { ReadPulse, SarConvert, Compare, IhDecode, WritePhase };
inline constexpr int kEventKinds = 5;

enum class DecodeClass { HdPv, Harp };

std::string_view to_string(EventKind kind);
/// Throws UnknownEventKind.
EventKind parse_event_kind(std::string_view name);

/*!
 * One hardware event. units = comparisons for Compare (1 or 2), pulses for
 * WritePhase (max pulse count of the phase), 1 otherwise.
 */
struct CostEvent {
  EventKind kind;
  int units = 1;
  DecodeClass decode_class = DecodeClass::HdPv;
};

/// Integer accumulator: picoseconds and femtojoules, so totals are exact.
struct Tally {
  std::int64_t events = 0;
  std::int64_t units = 0;
  std::int64_t ps = 0;
  std::int64_t fj = 0;

  Tally& operator+=(const Tally& o) {
    events += o.events;
    units += o.units;
    ps += o.ps;
    fj += o.fj;
    return *this;
  }
  bool operator==(const Tally&) const = default;
};

/*!
 * Event-level latency/energy accumulator.
 *
 * Events are folded into per-kind tallies (plus a split of compare events by
 * comparison count and of decode events by class) on arrival. Totals are the
 * exact integer sum of the tallies.
 */
class CostLedger {
 public:
  CostLedger() = default;
  explicit CostLedger(const CostParams& params) : params_(params) {}

  const CostParams& params() const noexcept { return params_; }

  void charge(const CostEvent& event);
  void note_saturation() { ++saturations_; }

  const Tally& tally(EventKind kind) const { return tallies_[static_cast<int>(kind)]; }
  std::int64_t compare_events_with(int comparisons) const { return compares_by_count_.at(comparisons - 1); }
  std::int64_t decode_events(DecodeClass c) const { return decodes_by_class_[static_cast<int>(c)]; }
  std::int64_t saturations() const noexcept { return saturations_; }
  /// Read patterns applied to the array (one per convert or compare).
  std::int64_t read_patterns() const;

  std::int64_t total_ps() const;
  std::int64_t total_fj() const;
  double total_ns() const { return total_ps() * 1e-3; }
  double total_pj() const { return total_fj() * 1e-3; }
  /// Energy of TIA + ADC activity (conversions and compares).
  double adc_energy_pj() const;
  double adc_latency_ns() const;

  CostLedger& operator+=(const CostLedger& other);
  bool operator==(const CostLedger& o) const {
    return tallies_ == o.tallies_ && compares_by_count_ == o.compares_by_count_ &&
           decodes_by_class_ == o.decodes_by_class_ && saturations_ == o.saturations_;
  }

  /// CSV: one row per event kind (kind,events,units,ns,pJ).
  void write_csv(std::ostream& os) const;
  nlohmann::json summary_json() const;

 private:
  CostParams params_{};
  std::array<Tally, kEventKinds> tallies_{};
  std::array<std::int64_t, 2> compares_by_count_{};
  std::array<std::int64_t, 2> decodes_by_class_{};
  std::int64_t saturations_ = 0;
};

inline void charge(CostLedger& ledger, const CostEvent& event) { ledger.charge(event); }

/// Fixed-point conversions used by the ledger.
inline std::int64_t to_ps(double ns) { return static_cast<std::int64_t>(ns * 1000.0 + (ns >= 0 ? 0.5 : -0.5)); }
inline std::int64_t to_fj(double pj) { return static_cast<std::int64_t>(pj * 1000.0 + (pj >= 0 ? 0.5 : -0.5)); }

/*!
 * Ledger of one verify sweep over an N-cell column, built from the scheme's
 * event composition. Compare events are charged with `comparisons` each.
 */
CostLedger sweep_ledger(const Scheme& scheme, int n, const CostParams& params, int comparisons = 1);

struct CostRatio {
  double latency = 0.0;
  double energy = 0.0;
};

/// Per-sweep cost of `a` over `b` (single-comparison compares).
CostRatio sweep_cost_ratio(const Scheme& a, const Scheme& b, int n, const CostParams& params);

}  // namespace hdwv
