// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "hdwv/cost_model.hpp"
#include "hdwv/error.hpp"

namespace hdwv {
namespace {

TEST(CostParams, ResolutionInterpolation) {
  const auto p8 = CostParams::for_resolution(8), p9 = CostParams::for_resolution(9),
             p10 = CostParams::for_resolution(10);
  EXPECT_DOUBLE_EQ(p8.sar_latency_ns, 45.0);
  EXPECT_DOUBLE_EQ(p9.sar_latency_ns, 47.5);
  EXPECT_DOUBLE_EQ(p10.sar_latency_ns, 50.0);
  EXPECT_NEAR(p9.tia_energy_pj, 2.07, 1e-12);
  EXPECT_NEAR(p8.sar_energy_pj, 1.8, 1e-12);
  EXPECT_NEAR(p9.sar_energy_pj, std::sqrt(1.8 * 32.0), 1e-12);
  EXPECT_NEAR(p10.sar_energy_pj, 32.0, 1e-9);
  EXPECT_NEAR(p9.compare_energy_pj, 0.2 * p9.sar_energy_pj, 1e-12);
  EXPECT_NEAR(p9.ih_decode_energy_hdpv_pj, 0.9, 1e-12);
}

TEST(CostLedger, ConvertLatency) {
  CostLedger l(CostParams::for_resolution(9));
  l.charge({EventKind::SarConvert});
  EXPECT_EQ(l.total_ps(), 79500);
  EXPECT_EQ(l.total_fj(), to_fj(2.07 + std::sqrt(1.8 * 32.0)));
}

TEST(CostLedger, CompareLatencyAndEnergy) {
  const auto p = CostParams::for_resolution(9);
  CostLedger l(p);
  l.charge({EventKind::Compare, 1});
  EXPECT_EQ(l.total_ps(), 62000);
  l.charge({EventKind::Compare, 2});
  EXPECT_EQ(l.total_ps(), 124000);
  EXPECT_EQ(l.total_fj(), to_fj(2.07 + 0.2 * p.sar_energy_pj) + to_fj(2.07 + 0.4 * p.sar_energy_pj));
  EXPECT_EQ(l.tally(EventKind::Compare).units, 3);
}

TEST(CostLedger, BadCompareCount) {
  CostLedger l;
  EXPECT_THROW(l.charge({EventKind::Compare, 3}), Error);
}

TEST(CostLedger, WritePhase) {
  CostLedger l;
  l.charge({EventKind::WritePhase, 6});
  EXPECT_EQ(l.total_ps(), 600000);
  EXPECT_EQ(l.total_fj(), 0);
}

TEST(CostLedger, HdpvSweepOfThirtyTwo) {
  const auto led = sweep_ledger(Scheme::hdpv(), 32, CostParams::for_resolution(9));
  EXPECT_EQ(led.total_ps(), 2549000);
  EXPECT_EQ(led.read_patterns(), 32);
  EXPECT_EQ(led.decode_events(DecodeClass::HdPv), 1);
}

TEST(CostLedger, ReadPatternParity) {
  const auto p = CostParams::for_resolution(9);
  for (int n : {4, 32, 64}) {
    EXPECT_EQ(sweep_ledger(Scheme::cwsc(), n, p).read_patterns(), n);
    EXPECT_EQ(sweep_ledger(Scheme::hdpv(), n, p).read_patterns(), n);
    EXPECT_EQ(sweep_ledger(Scheme::harp(), n, p).read_patterns(), n);
    EXPECT_EQ(sweep_ledger(Scheme::multiread(5), n, p).read_patterns(), 5 * n);
  }
}

TEST(CostLedger, MultiReadOverHdpvRatio) {
  const auto r = sweep_cost_ratio(Scheme::multiread(5), Scheme::hdpv(), 32, CostParams::for_resolution(9));
  const double oracle = (5.0 * 32 * 79.5) / (32 * 79.5 + 5.0);
  EXPECT_NEAR(r.latency, oracle, 1e-9);
  EXPECT_NEAR(r.latency, 4.99, 0.01);
}

TEST(CostLedger, SweepRejectsEmptyColumn) {
  EXPECT_THROW(sweep_ledger(Scheme::hdpv(), 0, CostParams{}), Error);
}

TEST(CostLedger, TotalsAreSumOfTallies) {
  CostLedger a(CostParams::for_resolution(9)), b(CostParams::for_resolution(9));
  for (int i = 0; i < 1000; ++i) {
    a.charge({EventKind::SarConvert});
    a.charge({EventKind::Compare, 1 + i % 2});
    b.charge({EventKind::IhDecode, 1, i % 3 ? DecodeClass::HdPv : DecodeClass::Harp});
    b.charge({EventKind::WritePhase, 1 + i % 8});
  }
  std::int64_t ps = 0, fj = 0;
  for (int k = 0; k < kEventKinds; ++k) {
    ps += a.tally(static_cast<EventKind>(k)).ps;
    fj += a.tally(static_cast<EventKind>(k)).fj;
  }
  EXPECT_EQ(a.total_ps(), ps);
  EXPECT_EQ(a.total_fj(), fj);
  CostLedger sum = a;
  sum += b;
  EXPECT_EQ(sum.total_ps(), a.total_ps() + b.total_ps());
  EXPECT_EQ(sum.total_fj(), a.total_fj() + b.total_fj());
  EXPECT_EQ(sum.read_patterns(), 2000);
}

TEST(CostLedger, AdcShare) {
  const auto l = sweep_ledger(Scheme::hdpv(), 32, CostParams::for_resolution(9));
  EXPECT_GT(l.adc_energy_pj() / l.total_pj(), 0.9);
}

TEST(EventKind, NamesRoundTrip) {
  for (int k = 0; k < kEventKinds; ++k) {
    const auto kind = static_cast<EventKind>(k);
    EXPECT_EQ(parse_event_kind(to_string(kind)), kind);
  }
  try {
    parse_event_kind("flux_capacitor");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownEventKind);
  }
}

TEST(CostLedger, CsvIsExact) {
  CostLedger l(CostParams::for_resolution(9));
  l.charge({EventKind::SarConvert});
  std::ostringstream os;
  l.write_csv(os);
  EXPECT_NE(os.str().find("sar_convert,1,1,79.500,"), std::string::npos);
}

}  // namespace
}  // namespace hdwv
