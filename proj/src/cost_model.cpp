// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#include "hdwv/cost_model.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "hdwv/error.hpp"

namespace hdwv {

namespace {
// Table anchors at 8 and 10 bits.
constexpr double kSarLatency8 = 45.0, kSarLatency10 = 50.0;
constexpr double kTia8 = 1.44, kTia10 = 2.7;
constexpr double kSar8 = 1.8, kSar10 = 32.0;
constexpr double kHdpvDecodeLo = 0.8, kHdpvDecodeHi = 1.0;

double lerp_bits(double lo, double hi, int bits) { return lo + (hi - lo) * (bits - 8) / 2.0; }
double gerp_bits(double lo, double hi, int bits) { return lo * std::pow(hi / lo, (bits - 8) / 2.0); }
}  // namespace

CostParams CostParams::for_resolution(int bits) {
  CostParams p;
  p.sar_latency_ns = lerp_bits(kSarLatency8, kSarLatency10, bits);
  p.tia_energy_pj = lerp_bits(kTia8, kTia10, bits);
  p.sar_energy_pj = gerp_bits(kSar8, kSar10, bits);
  p.compare_energy_pj = 0.2 * p.sar_energy_pj;
  p.ih_decode_energy_hdpv_pj = 0.5 * (kHdpvDecodeLo + kHdpvDecodeHi);
  return p;
}

void CostParams::validate() const {
  for (double v : {read_pulse_ns, sar_latency_ns, compare_latency_ns, tia_energy_pj, sar_energy_pj,
                   compare_energy_pj, write_pulse_ns, write_pulse_energy_pj, ih_decode_latency_ns,
                   ih_decode_energy_hdpv_pj, ih_decode_energy_harp_pj})
    if (!(v >= 0.0)) throw Error(ErrorCode::ConfigInconsistent, "cost parameters must be >= 0");
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::ReadPulse: return "read_pulse";
    case EventKind::SarConvert: return "sar_convert";
    case EventKind::Compare: return "compare";
    case EventKind::IhDecode: return "ih_decode";
    case EventKind::WritePhase: return "write_phase";
  }
  throw Error(ErrorCode::UnknownEventKind, std::to_string(static_cast<int>(kind)));
}

EventKind parse_event_kind(std::string_view name) {
  for (int k = 0; k < kEventKinds; ++k)
    if (to_string(static_cast<EventKind>(k)) == name) return static_cast<EventKind>(k);
  throw Error(ErrorCode::UnknownEventKind, std::string(name));
}

void CostLedger::charge(const CostEvent& e) {
  const auto& p = params_;
  double ns = 0.0, pj = 0.0;
  switch (e.kind) {
    case EventKind::ReadPulse:
      ns = p.read_pulse_ns;
      break;
    case EventKind::SarConvert:
      ns = p.read_pulse_ns + p.sar_latency_ns;
      pj = p.tia_energy_pj + p.sar_energy_pj;
      break;
    case EventKind::Compare:
      if (e.units < 1 || e.units > 2)
        throw Error(ErrorCode::UnknownEventKind, "compare with " + std::to_string(e.units) + " comparisons");
      ns = p.read_pulse_ns + p.compare_latency_ns;
      pj = p.tia_energy_pj + e.units * p.compare_energy_pj;
      ++compares_by_count_[e.units - 1];
      break;
    case EventKind::IhDecode:
      ns = p.ih_decode_latency_ns;
      pj = e.decode_class == DecodeClass::HdPv ? p.ih_decode_energy_hdpv_pj : p.ih_decode_energy_harp_pj;
      ++decodes_by_class_[static_cast<int>(e.decode_class)];
      break;
    case EventKind::WritePhase:
      ns = e.units * p.write_pulse_ns;
      pj = e.units * p.write_pulse_energy_pj;
      break;
    default:
      throw Error(ErrorCode::UnknownEventKind, std::to_string(static_cast<int>(e.kind)));
  }
  auto& t = tallies_[static_cast<int>(e.kind)];
  ++t.events;
  t.units += e.units;
  t.ps += to_ps(ns);
  t.fj += to_fj(pj);
}

std::int64_t CostLedger::read_patterns() const {
  return tally(EventKind::SarConvert).events + tally(EventKind::Compare).events;
}

std::int64_t CostLedger::total_ps() const {
  std::int64_t s = 0;
  for (const auto& t : tallies_) s += t.ps;
  return s;
}

std::int64_t CostLedger::total_fj() const {
  std::int64_t s = 0;
  for (const auto& t : tallies_) s += t.fj;
  return s;
}

double CostLedger::adc_energy_pj() const {
  return (tally(EventKind::SarConvert).fj + tally(EventKind::Compare).fj) * 1e-3;
}

double CostLedger::adc_latency_ns() const {
  return (tally(EventKind::SarConvert).ps + tally(EventKind::Compare).ps) * 1e-3;
}

CostLedger& CostLedger::operator+=(const CostLedger& o) {
  for (int k = 0; k < kEventKinds; ++k) tallies_[k] += o.tallies_[k];
  for (int i = 0; i < 2; ++i) {
    compares_by_count_[i] += o.compares_by_count_[i];
    decodes_by_class_[i] += o.decodes_by_class_[i];
  }
  saturations_ += o.saturations_;
  return *this;
}

void CostLedger::write_csv(std::ostream& os) const {
  os << "kind,events,units,ns,pJ\n";
  for (int k = 0; k < kEventKinds; ++k) {
    const auto& t = tallies_[k];
    os << to_string(static_cast<EventKind>(k)) << ',' << t.events << ',' << t.units << ','
       << t.ps / 1000 << '.' << std::to_string(1000 + t.ps % 1000).substr(1) << ','
       << t.fj / 1000 << '.' << std::to_string(1000 + t.fj % 1000).substr(1) << '\n';
  }
}

nlohmann::json CostLedger::summary_json() const {
  nlohmann::json j;
  for (int k = 0; k < kEventKinds; ++k) {
    const auto& t = tallies_[k];
    j["events"][std::string(to_string(static_cast<EventKind>(k)))] = {
        {"count", t.events}, {"units", t.units}, {"ps", t.ps}, {"fJ", t.fj}};
  }
  j["compare_1"] = compares_by_count_[0];
  j["compare_2"] = compares_by_count_[1];
  j["decode_hdpv"] = decodes_by_class_[0];
  j["decode_harp"] = decodes_by_class_[1];
  j["saturations"] = saturations_;
  j["total_ps"] = total_ps();
  j["total_fJ"] = total_fj();
  return j;
}

CostLedger sweep_ledger(const Scheme& scheme, int n, const CostParams& params, int comparisons) {
  if (n < 1) throw Error(ErrorCode::InvalidDimensions, "sweep needs at least one cell");
  CostLedger ledger(params);
  switch (scheme.kind) {
    case SchemeKind::CwSc:
      for (int i = 0; i < n; ++i) ledger.charge({EventKind::Compare, comparisons});
      break;
    case SchemeKind::MultiRead:
      for (int i = 0; i < n * scheme.reads_per_cell; ++i) ledger.charge({EventKind::SarConvert});
      break;
    case SchemeKind::HdPv:
      for (int i = 0; i < n; ++i) ledger.charge({EventKind::SarConvert});
      ledger.charge({EventKind::IhDecode, 1, DecodeClass::HdPv});
      break;
    case SchemeKind::Harp:
      for (int i = 0; i < n; ++i) ledger.charge({EventKind::Compare, comparisons});
      ledger.charge({EventKind::IhDecode, 1, DecodeClass::Harp});
      break;
  }
  return ledger;
}

CostRatio sweep_cost_ratio(const Scheme& a, const Scheme& b, int n, const CostParams& params) {
  const CostLedger la = sweep_ledger(a, n, params);
  const CostLedger lb = sweep_ledger(b, n, params);
  return {static_cast<double>(la.total_ps()) / static_cast<double>(lb.total_ps()),
          static_cast<double>(la.total_fj()) / static_cast<double>(lb.total_fj())};
}

}  // namespace hdwv
