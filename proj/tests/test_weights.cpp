// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "hdwv/error.hpp"
#include "hdwv/weight_io.hpp"
#include "hdwv/weight_mapper.hpp"

namespace hdwv {
namespace {

WvConfig quiet_config(Scheme s) {
  WvConfig c;
  c.scheme = s;
  c.device.sigma_map_rel = c.device.d2d_sigma_rel = c.device.c2c_sigma_rel = c.device.nonlinearity = 0.0;
  c.noise = {0.0, 0.0};
  c.max_coarse_iters = 0;
  return c;
}

WeightTensor random_tensor(std::int64_t n, std::uint64_t seed) {
  Engine rng(seed);
  WeightTensor t{{n}, Eigen::VectorXd(n)};
  for (std::int64_t i = 0; i < n; ++i) t.values[i] = 0.05 * standard_normal(rng);
  return t;
}

TEST(Quantize, Endpoints) {
  const auto q = quantize(Eigen::Vector3d(-1.0, 0.0, 1.0), 6);
  EXPECT_EQ(q.codes, Eigen::Vector3i(-31, 0, 31));
  EXPECT_DOUBLE_EQ(q.scale, 1.0 / 31.0);
  EXPECT_FALSE(q.all_zero);
}

TEST(Quantize, HalfRoundsAway) {
  const auto q = quantize(Eigen::Vector3d(0.5, 1.0, -0.5), 6);
  EXPECT_EQ(q.codes, Eigen::Vector3i(16, 31, -16));
}

TEST(Quantize, AllZero) {
  const auto q = quantize(Eigen::VectorXd::Zero(5), 6);
  EXPECT_TRUE(q.all_zero);
  EXPECT_EQ(q.scale, 1.0);
  EXPECT_TRUE(q.codes.isZero());
}

TEST(Quantize, Errors) {
  try {
    quantize(Eigen::VectorXd(0), 6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidDimensions);
  }
  EXPECT_THROW(quantize(Eigen::Vector2d(1, 2), 1), Error);
}

TEST(Quantize, ErrorBoundedByHalfStep) {
  const auto t = random_tensor(1000, 3);
  const auto q = quantize(t.values, 6);
  const Eigen::VectorXd back = dequantize(q.codes, q.scale);
  EXPECT_LE((back - t.values).cwiseAbs().maxCoeff(), 0.5 * q.scale * (1 + 1e-12));
}

TEST(Slices, Examples) {
  EXPECT_EQ(slice_code(31, 6, 3), (std::vector<int>{7, 3}));
  EXPECT_EQ(slice_code(0, 6, 3), (std::vector<int>{0, 0}));
  EXPECT_EQ(slice_code(-20, 6, 3), (std::vector<int>{4, 2}));
  try {
    slice_code(32, 6, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CodeOutOfRange);
  }
}

TEST(Slices, RecombineIdentityAllCodes) {
  for (auto [b, bc] : {std::pair{6, 3}, std::pair{8, 2}, std::pair{8, 4}})
    for (int code = -((1 << (b - 1)) - 1); code < (1 << (b - 1)); ++code)
      ASSERT_EQ(recombine(slice_code(code, b, bc), bc, code < 0 ? -1 : 1), code) << b << "/" << bc;
}

TEST(Mapping, PaddingAndSlots) {
  WvConfig cfg;
  const auto t = random_tensor(70, 4);
  const auto m = map_tensor(t, cfg);
  EXPECT_EQ(m.groups(), 3);
  EXPECT_EQ(m.slot(69).group, 2);
  EXPECT_EQ(m.slot(69).row, 5);
  EXPECT_EQ(m.index(m.slot(33)), 33);
  const Eigen::VectorXi last = m.group_codes(2);
  EXPECT_EQ(last.head(6), m.codes.tail(6));
  EXPECT_TRUE(last.tail(26).isZero());
  EXPECT_THROW(m.slot(70), Error);
  EXPECT_THROW(m.group_codes(3), Error);
}

TEST(Mapping, ShapeMismatch) {
  WeightTensor t{{2, 3}, Eigen::VectorXd::Zero(5)};
  EXPECT_THROW(map_tensor(t, WvConfig{}), Error);
}

TEST(Program, NoiselessReadbackIsExact) {
  const auto cfg = quiet_config(Scheme::hdpv());
  const WeightTensor t = random_tensor(100, 5);
  const auto res = program_tensor(t, cfg);
  const auto back = readback_effective(res.arrays, res.mapping);
  EXPECT_EQ(back.shape, t.shape);
  const Eigen::VectorXd want = dequantize(res.mapping.codes, res.mapping.scale);
  EXPECT_LT((back.values - want).cwiseAbs().maxCoeff(), 1e-12 * res.mapping.scale);
}

TEST(Program, AllZeroTensor) {
  WvConfig cfg;
  const WeightTensor t{{64}, Eigen::VectorXd::Zero(64)};
  const auto res = program_tensor(t, cfg);
  for (const auto& a : res.arrays) EXPECT_EQ(a.set_pulses().sum() + a.reset_pulses().sum(), 0);
  for (const auto& c : res.columns) {
    EXPECT_TRUE(c.converged);
    EXPECT_LE(c.iterations_used, cfg.k_streak);
  }
  EXPECT_TRUE(readback_effective(res.arrays, res.mapping).values.isZero());
}

TEST(Program, SingleSliceOffsetWeighting) {
  const auto cfg = quiet_config(Scheme::hdpv());
  const WeightTensor t{{3}, Eigen::Vector3d(0.9, -0.3, 0.62)};
  auto res = program_tensor(t, cfg);
  const Eigen::VectorXd before = readback_effective(res.arrays, res.mapping).values;
  // Raise the upper slice of weight 0 by one level.
  auto& a = res.arrays[0];
  const ColumnRef msb = slice_pair(1);
  a.set_conductance(0, msb.pos, a.conductance(0, msb.pos) + a.params().lsb());
  const Eigen::VectorXd after = readback_effective(res.arrays, res.mapping).values;
  EXPECT_NEAR(after[0] - before[0], 8.0 * res.mapping.scale, 1e-12);
  EXPECT_EQ(after.tail(2), before.tail(2));
}

TEST(Program, SignSymmetry) {
  WvConfig cfg;
  cfg.scheme = Scheme::hdpv();
  cfg.device.d2d_sigma_rel = 0.0;
  cfg.noise = {0.0, 0.0};
  // Single-signed so both runs issue their write phases in the same order.
  WeightTensor pos = random_tensor(96, 6);
  pos.values = pos.values.cwiseAbs();
  WeightTensor neg = pos;
  neg.values = -pos.values;
  for (Scheme s : {Scheme::hdpv(), Scheme::harp(), Scheme::cwsc()}) {
    cfg.scheme = s;
    const auto rp = program_tensor(pos, cfg), rn = program_tensor(neg, cfg);
    const auto bp = readback_effective(rp.arrays, rp.mapping), bn = readback_effective(rn.arrays, rn.mapping);
    EXPECT_EQ(bn.values, (-bp.values).eval()) << to_string(s);
    // Low and High cost different comparison counts, so only writes and reads mirror.
    EXPECT_EQ(rp.cost.tally(EventKind::WritePhase), rn.cost.tally(EventKind::WritePhase)) << to_string(s);
    EXPECT_EQ(rp.cost.read_patterns(), rn.cost.read_patterns()) << to_string(s);
  }
}

TEST(Program, GroupsIndependentOfTensorLength) {
  WvConfig cfg;
  const WeightTensor small = random_tensor(64, 7);
  WeightTensor big = random_tensor(128, 7);
  big.values.head(64) = small.values;
  // Same peak, so the first two groups see identical codes and seeds.
  big.values.tail(64) = big.values.tail(64).cwiseMin(small.values.cwiseAbs().maxCoeff() * 0.5)
                            .cwiseMax(-small.values.cwiseAbs().maxCoeff() * 0.5);
  const auto rs = program_tensor(small, cfg), rb = program_tensor(big, cfg);
  ASSERT_EQ(rs.mapping.codes, rb.mapping.codes.head(64));
  for (int g = 0; g < 2; ++g) EXPECT_EQ(rs.arrays[g].conductance(), rb.arrays[g].conductance());
}

TEST(Program, InvalidConfig) {
  WvConfig cfg;
  cfg.n = 24;
  try {
    program_tensor(random_tensor(10, 1), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigInconsistent);
  }
}

bool bit_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

TEST(Container, RoundTripIsBitExact) {
  WeightFile f;
  f.tensor = random_tensor(500, 8);
  f.tensor.shape = {20, 25};
  f.tensor.values[0] = -0.0;
  f.tensor.values[1] = std::numeric_limits<double>::denorm_min();
  f.tensor.values[2] = std::numeric_limits<double>::max();
  f.tensor.values[3] = 0.1 + 0.2;
  f.b = 6;
  f.scale = 1.0 / 3.0;
  f.seed = 0xFFFFFFFFFFFFFFFFull;
  f.provenance = {{"scheme", "hdpv"}};
  std::stringstream ss;
  write_weights(ss, f);
  const WeightFile g = read_weights(ss);
  EXPECT_TRUE(bit_equal(f.tensor.values, g.tensor.values));
  EXPECT_EQ(g.tensor.shape, f.tensor.shape);
  EXPECT_EQ(g.scale, f.scale);
  EXPECT_EQ(g.seed, f.seed);
  EXPECT_EQ(g.provenance, f.provenance);
  std::stringstream again;
  write_weights(again, g);
  EXPECT_EQ(again.str(), ss.str());
}

TEST(Container, ParseErrors) {
  const char* bad[] = {
      "",
      "not json\n1\n",
      "{\"B\":6,\"layout_version\":2,\"scale\":1,\"seed\":0,\"shape\":[1]}\n1\n",
      "{\"B\":6,\"layout_version\":1,\"scale\":1,\"seed\":0,\"shape\":[2]}\n1\n",
      "{\"B\":6,\"layout_version\":1,\"scale\":1,\"seed\":0,\"shape\":[1]}\n1x\n",
      "{\"B\":6,\"layout_version\":1,\"scale\":1,\"seed\":0,\"shape\":[1]}\n1\n2\n",
      "{\"B\":6,\"layout_version\":1,\"scale\":1,\"seed\":0,\"shape\":[-1]}\n",
  };
  for (const char* text : bad) {
    std::istringstream is(text);
    try {
      read_weights(is);
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ParseError) << text;
    }
  }
}

TEST(Container, MissingFile) {
  try {
    load_weights("/nonexistent/dir/w.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidSpec);
  }
}

}  // namespace
}  // namespace hdwv
