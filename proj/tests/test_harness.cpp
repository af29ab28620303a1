// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <gtest/gtest.h>

#include "hdwv/error.hpp"
#include "hdwv/harness.hpp"
#include "hdwv/weight_io.hpp"

namespace hdwv {
namespace fs = std::filesystem;
namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hdwv_test_" + name);
  fs::remove_all(p);
  return p;
}

TEST(Schemes, NamesRoundTrip) {
  for (Scheme s : {Scheme::cwsc(), Scheme::hdpv(), Scheme::harp(), Scheme::multiread(5), Scheme::multiread(12)})
    EXPECT_EQ(parse_scheme(to_string(s)), s);
  EXPECT_EQ(parse_scheme("multiread:3"), Scheme::multiread(3));
  EXPECT_EQ(parse_scheme("HD-PV"), Scheme::hdpv());
  EXPECT_THROW(parse_scheme("bogus"), Error);
  EXPECT_THROW(parse_scheme("multiread0"), Error);
}

TEST(Experiment, Names) {
  EXPECT_EQ(parse_experiment("noise_sweep"), ExperimentKind::NoiseSweep);
  EXPECT_EQ(parse_experiment("compare-averaging"), ExperimentKind::AveragingCompare);
  EXPECT_EQ(to_string(ExperimentKind::ProgramTensor), "program-tensor");
  EXPECT_THROW(parse_experiment("nope"), Error);
}

TEST(Config, ParsesKeys) {
  std::istringstream is(R"(# comment
experiment = rho_sweep
trials = 7   # trailing comment
seed = 99
schemes = cwsc, harp
rho_values = 0, 0.25
n = 16
sigma_lsb = 0.5
cm_mode = per_column_static
cost.sar_latency_ns = 40
)");
  ExperimentSpec s;
  parse_config(is, s);
  EXPECT_EQ(s.experiment, ExperimentKind::RhoSweep);
  EXPECT_EQ(s.trials, 7);
  EXPECT_EQ(s.seed, 99u);
  EXPECT_EQ(s.schemes, (std::vector<Scheme>{Scheme::cwsc(), Scheme::harp()}));
  EXPECT_EQ(s.rho_values, (std::vector<double>{0.0, 0.25}));
  EXPECT_EQ(s.base.n, 16);
  EXPECT_EQ(s.base.noise.sigma_total_lsb, 0.5);
  EXPECT_EQ(s.base.noise.cm_mode, CommonModeMode::PerColumnStatic);
  EXPECT_EQ(s.resolved_base().cost_params().sar_latency_ns, 40.0);
  EXPECT_NO_THROW(s.validate());
}

TEST(Config, ErrorsNameTheLine) {
  for (const char* text : {"trials = 3\nwhat\n", "trials = 3\nfrobnicate = 1\n", "trials = 3\ntrials = x\n"}) {
    std::istringstream is(text);
    ExperimentSpec s;
    try {
      parse_config(is, s);
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidSpec);
      EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
  }
}

TEST(Config, MissingFileNamesPath) {
  ExperimentSpec s;
  try {
    load_config("/no/such/hdwv.cfg", s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidSpec);
    EXPECT_NE(std::string(e.what()).find("/no/such/hdwv.cfg"), std::string::npos);
  }
}

TEST(Config, FormatRoundTrips) {
  ExperimentSpec s;
  apply_setting(s, "experiment", "tau-sweep");
  apply_setting(s, "tau_values", "1,3");
  apply_setting(s, "rho", "0.3");
  apply_setting(s, "sigma_map_rel", "0.05");
  apply_setting(s, "cost.compare_energy_pj", "0.75");
  const std::string text = format_config(s);
  ExperimentSpec t;
  std::istringstream is(text);
  parse_config(is, t);
  EXPECT_EQ(format_config(t), text);
  EXPECT_EQ(t.entries(), s.entries());
}

TEST(Config, ValidateCatchesInconsistency) {
  ExperimentSpec s;
  s.base.n = 24;
  EXPECT_THROW(s.validate(), Error);
  s.schemes = {Scheme::cwsc()};
  EXPECT_NO_THROW(s.validate());
  s.trials = 0;
  EXPECT_THROW(s.validate(), Error);
}

TEST(Spec, DefaultSchemes) {
  ExperimentSpec s;
  EXPECT_EQ(s.effective_schemes().size(), 3u);
  s.experiment = ExperimentKind::TauSweep;
  EXPECT_EQ(s.effective_schemes(), std::vector<Scheme>{Scheme::harp()});
  s.experiment = ExperimentKind::AveragingCompare;
  EXPECT_EQ(s.effective_schemes().back(), Scheme::multiread(5));
}

TEST(Stats, Summarize) {
  const Stat s = summarize({2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0});
  EXPECT_DOUBLE_EQ(s.mean, 5.0);
  EXPECT_NEAR(s.std, std::sqrt(32.0 / 7.0), 1e-12);
  EXPECT_EQ(summarize({3.0}).std, 0.0);
  const Stat a = summarize({0.1, 0.7, 1e9, 0.3}), b = summarize({1e9, 0.3, 0.1, 0.7});
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std, b.std);
}

TEST(FormatDouble, Shortest) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

ExperimentSpec small_spec(ExperimentKind kind, const fs::path& out) {
  ExperimentSpec s;
  s.experiment = kind;
  s.trials = 3;
  s.seed = 7;
  s.out_dir = out;
  return s;
}

TEST(RunExperiment, ByteIdenticalOutputs) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  auto sa = small_spec(ExperimentKind::Convergence, a);
  sa.format = OutputFormat::Json;
  auto sb = sa;
  sb.out_dir = b;
  run_experiment(sa);
  run_experiment(sb);
  int files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path();
  }
  EXPECT_GE(files, 4);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(RunExperiment, SeedChangesResults) {
  auto s = small_spec(ExperimentKind::Convergence, {});
  const auto r1 = run_experiment(s);
  s.seed = 8;
  const auto r2 = run_experiment(s);
  EXPECT_NE(r1.row("hdpv").rms_weight.mean, r2.row("hdpv").rms_weight.mean);
}

TEST(RunExperiment, GridAndRows) {
  auto s = small_spec(ExperimentKind::NoiseSweep, {});
  s.noise_levels = {0.0, 0.7};
  s.schemes = {Scheme::hdpv(), Scheme::cwsc()};
  const auto r = run_experiment(s);
  EXPECT_EQ(r.grid_points(), 2);
  EXPECT_EQ(r.rows.size(), 4u);
  EXPECT_EQ(r.runs.size(), 12u);
  EXPECT_EQ(r.row("cwsc", 1).value, 0.7);
  EXPECT_EQ(r.row("hdpv", 0).trials, 3);
  EXPECT_THROW(r.row("harp", 0), Error);
  for (const auto& row : r.rows) EXPECT_GT(row.adc_energy_share(), 0.9);
}

TEST(RunExperiment, ProgramTensorExports) {
  const fs::path out = scratch("program");
  auto s = small_spec(ExperimentKind::ProgramTensor, out);
  s.trials = 1;
  s.tensor_size = 70;
  s.schemes = {Scheme::hdpv()};
  const auto r = run_experiment(s);
  const auto f = load_weights(out / "programmed_hdpv.txt");
  EXPECT_EQ(f.tensor.shape, std::vector<std::int64_t>{70});
  EXPECT_EQ(f.b, 6);
  EXPECT_EQ(f.provenance.at("scheme"), "hdpv");
  EXPECT_GT(r.row("hdpv").rms_weight.mean, 0.0);
  fs::remove_all(out);
}

TEST(RunExperiment, ProgramTensorFromFile) {
  const fs::path out = scratch("program_file");
  fs::create_directories(out);
  WeightFile in;
  in.tensor = {{2, 4}, (Eigen::VectorXd(8) << 0.1, -0.2, 0.3, 0.0, 0.5, -0.6, 0.05, 0.9).finished()};
  save_weights(out / "in.txt", in);
  auto s = small_spec(ExperimentKind::ProgramTensor, out / "res");
  s.trials = 1;
  s.tensor = out / "in.txt";
  s.schemes = {Scheme::harp()};
  run_experiment(s);
  EXPECT_EQ(load_weights(out / "res" / "programmed_harp.txt").tensor.shape, (std::vector<std::int64_t>{2, 4}));
  fs::remove_all(out);
}

TEST(RunExperiment, UnwritableOutput) {
  auto s = small_spec(ExperimentKind::Convergence, "/proc/hdwv_cannot_write_here");
  s.trials = 1;
  try {
    run_experiment(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutputUnwritable);
  }
}

TEST(Selftest, AllChecksPass) {
  const auto checks = run_selftest();
  EXPECT_GE(checks.size(), 5u);
  for (const auto& c : checks) EXPECT_TRUE(c.ok) << c.name << ": " << c.detail;
}

}  // namespace
}  // namespace hdwv
