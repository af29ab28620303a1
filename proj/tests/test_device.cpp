// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "hdwv/device.hpp"
#include "hdwv/error.hpp"

namespace hdwv {
namespace {

DeviceParams quiet_linear() {
  DeviceParams p;
  p.sigma_map_rel = 0.0;
  p.d2d_sigma_rel = 0.0;
  p.c2c_sigma_rel = 0.0;
  p.nonlinearity = 0.0;
  return p;
}

double sample_std(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m += x;
  m /= xs.size();
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / (xs.size() - 1));
}

TEST(Device, LevelToConductance) {
  const DeviceParams p;
  EXPECT_DOUBLE_EQ(level_to_conductance(p, 0), 0.0);
  EXPECT_DOUBLE_EQ(level_to_conductance(p, 7), 13.0);
  EXPECT_NEAR(level_to_conductance(p, 3), 39.0 / 7.0, 1e-12);
  EXPECT_THROW(level_to_conductance(p, 8), Error);
  EXPECT_THROW(level_to_conductance(p, -1), Error);
}

TEST(Device, StartsAtHrs) {
  const CellArray a(32, 64, DeviceParams{}, 3);
  EXPECT_TRUE((a.conductance().array() == 0.0).all());
  EXPECT_TRUE((a.set_pulses().array() == 0).all());
}

TEST(Device, SeedDeterminesD2d) {
  const CellArray a(16, 8, DeviceParams{}, 42), b(16, 8, DeviceParams{}, 42), c(16, 8, DeviceParams{}, 43);
  EXPECT_EQ(a.d2d_gain(), b.d2d_gain());
  EXPECT_NE(a.d2d_gain(), c.d2d_gain());
}

TEST(Device, D2dSpread) {
  const CellArray a(100, 100, DeviceParams{}, 9);
  const auto& d = a.d2d_gain();
  const std::vector<double> xs(d.data(), d.data() + d.size());
  const double s = sample_std(xs);
  EXPECT_GE(s, 0.095);
  EXPECT_LE(s, 0.105);
}

TEST(Device, FourFinePulsesMakeOneLsb) {
  const DeviceParams p = quiet_linear();
  CellArray a(1, 1, p, 1);
  Engine rng(1);
  const PulseTarget t{0, 0, PulseDirection::Set, 4};
  a.apply_pulses({&t, 1}, PulseMode::Fine, rng);
  EXPECT_DOUBLE_EQ(a.level(0, 0), 1.0);
  EXPECT_EQ(a.set_pulses()(0, 0), 4);
}

TEST(Device, CoarsePulseIsFiveFineSteps) {
  const DeviceParams p = quiet_linear();
  CellArray a(1, 1, p, 1);
  Engine rng(1);
  const PulseTarget t{0, 0, PulseDirection::Set, 2};
  a.apply_pulses({&t, 1}, PulseMode::Coarse, rng);
  EXPECT_NEAR(a.level(0, 0), 2.5, 1e-12);
}

TEST(Device, ResetClipsAtHrs) {
  CellArray a(1, 1, quiet_linear(), 1);
  Engine rng(1);
  const PulseTarget t{0, 0, PulseDirection::Reset, 3};
  a.apply_pulses({&t, 1}, PulseMode::Fine, rng);
  EXPECT_EQ(a.conductance(0, 0), 0.0);
}

TEST(Device, SetClipsAtLrs) {
  CellArray a(1, 1, quiet_linear(), 1);
  a.set_conductance(0, 0, 12.9);
  Engine rng(1);
  const PulseTarget t{0, 0, PulseDirection::Set, 8};
  a.apply_pulses({&t, 1}, PulseMode::Coarse, rng);
  EXPECT_EQ(a.conductance(0, 0), 13.0);
}

TEST(Device, CoarseResetForbidden) {
  CellArray a(2, 2, DeviceParams{}, 1);
  Engine rng(1);
  const PulseTarget t{1, 1, PulseDirection::Reset, 1};
  try {
    a.apply_pulses({&t, 1}, PulseMode::Coarse, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CoarseResetForbidden);
  }
}

TEST(Device, OutOfRangeTarget) {
  CellArray a(2, 2, DeviceParams{}, 1);
  Engine rng(1);
  const PulseTarget t{2, 0, PulseDirection::Set, 1};
  try {
    a.apply_pulses({&t, 1}, PulseMode::Fine, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IndexOutOfRange);
  }
}

TEST(Device, MappingSigmaMonteCarlo) {
  DeviceParams p = quiet_linear();
  p.sigma_map_rel = 0.1;
  const int cells = 20000;
  CellArray a(cells, 1, p, 1);
  const double g0 = 6.5;
  std::vector<PulseTarget> ts;
  for (int r = 0; r < cells; ++r) {
    a.set_conductance(r, 0, g0);
    ts.push_back({r, 0, PulseDirection::Set, 1});
  }
  Engine rng(77);
  a.apply_pulses(ts, PulseMode::Fine, rng);
  std::vector<double> dg;
  for (int r = 0; r < cells; ++r) dg.push_back(a.conductance(r, 0) - g0 - p.fine_step());
  EXPECT_NEAR(sample_std(dg) / (0.1 * 13.0), 1.0, 0.03);
}

TEST(Device, SaturationShrinksSetNearLrs) {
  DeviceParams p = quiet_linear();
  p.nonlinearity = 1.0;
  CellArray a(2, 1, p, 1);
  a.set_conductance(1, 0, 11.0);
  Engine rng(1);
  const PulseTarget ts[] = {{0, 0, PulseDirection::Set, 1}, {1, 0, PulseDirection::Set, 1}};
  a.apply_pulses(ts, PulseMode::Fine, rng);
  EXPECT_NEAR(a.conductance(0, 0), p.fine_step(), 1e-12);
  EXPECT_LT(a.conductance(1, 0) - 11.0, p.fine_step());
}

TEST(Device, ValidatesParams) {
  DeviceParams p;
  p.g_max = -1.0;
  EXPECT_THROW(CellArray(2, 2, p, 1), Error);
  EXPECT_THROW(CellArray(0, 2, DeviceParams{}, 1), Error);
}

}  // namespace
}  // namespace hdwv
